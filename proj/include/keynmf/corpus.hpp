#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "keynmf/common.hpp"

namespace keynmf {

/// One timestamped text. Construct through make_document so the invariants
/// (non-empty id, non-blank text) hold everywhere downstream.
struct Document {
    std::string id;
    std::string text;
    std::int64_t timestamp;  // epoch seconds, UTC
    std::string source;
};

Document make_document(std::string id, std::string text, std::int64_t timestamp,
                       std::string source);

struct TokenizedDocument {
    std::string doc_id;
    std::vector<std::string> tokens;
};

struct TimeSliceSpec {
    std::int64_t origin;         // epoch seconds
    std::int64_t width_seconds;  // > 0
};

enum class SegmenterKind {
    Unicode,     // split on whitespace/punctuation, lowercase cased scripts
    Dictionary,  // greedy longest match over a lexicon, for unsegmented scripts
};

class Segmenter {
public:
    static Segmenter unicode();
    static Segmenter dictionary(const std::vector<std::string>& lexicon);

    SegmenterKind kind() const { return kind_; }

    /// Raw segmentation, before stopword filtering. Dictionary segmentation
    /// concatenates back to the input exactly (out-of-lexicon characters fall
    /// back to single-character tokens).
    std::vector<std::string> segment(const std::string& text) const;

private:
    Segmenter() = default;
    SegmenterKind kind_ = SegmenterKind::Unicode;
    std::set<std::u32string> lexicon_;
    std::size_t max_entry_len_ = 0;
};

/// Segments, lowercases (cased scripts), drops stopwords and pure
/// punctuation/whitespace tokens. Token order follows the text.
TokenizedDocument tokenize(const Document& doc, const Segmenter& segmenter,
                           const std::set<std::string>& stopwords);

/// Duplicate handling on ingest; the CLI keys a corpus by (id, timestamp)
/// unless --dedupe keeps only the first observation of each id.
enum class DedupePolicy {
    RejectDuplicateId,         // any repeated id is an error
    RejectDuplicateIdTimestamp,  // repeated (id, timestamp) is an error
    KeepFirstPerId,            // silently drop repeated scrapes of an id
};

/// One JSON object per line with string fields id, text, timestamp (ISO-8601),
/// source. Errors carry the offending line number.
std::vector<Document> ingest_jsonl(const std::filesystem::path& path,
                                   DedupePolicy policy = DedupePolicy::RejectDuplicateId);

/// Ascending slice index -> document positions in `docs`. Empty slices between
/// occupied ones are materialized. A timestamp before the origin is an error.
std::map<std::int64_t, std::vector<std::size_t>> slice_corpus(
    const std::vector<Document>& docs, const TimeSliceSpec& spec);

}  // namespace keynmf
