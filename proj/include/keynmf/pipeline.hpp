#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>

#include "keynmf/corpus.hpp"
#include "keynmf/dynamic.hpp"
#include "keynmf/embed.hpp"
#include "keynmf/infodyn.hpp"
#include "keynmf/keywords.hpp"
#include "keynmf/metrics.hpp"
#include "keynmf/nmf.hpp"

namespace keynmf {

struct TokenizerOptions {
    std::optional<std::filesystem::path> lexicon;    // present -> dictionary segmenter
    std::optional<std::filesystem::path> stopwords;
};

struct CorpusBundle {
    std::vector<Document> docs;
    std::vector<TokenizedDocument> tokenized;
};

CorpusBundle load_and_tokenize(const std::filesystem::path& corpus_path,
                               const TokenizerOptions& tok, bool dedupe);

/// Parses "test:SEED", "precomputed:PATH" (PATH.ids companion) or "http:URL".
/// http providers get the on-disk cache; KEYNMF_CACHE_DIR overrides its
/// location.
std::shared_ptr<EmbeddingProvider> make_provider(const std::string& spec,
                                                 std::uint64_t seed);

/// Full positive-similarity candidate list per document, sorted the same way
/// extract_keywords sorts. Truncating to n gives the keyword sets for that n,
/// which lets a sweep reuse one embedding pass.
struct DocCandidates {
    std::string doc_id;
    std::vector<std::pair<std::string, double>> sorted_positive;
};

std::vector<DocCandidates> compute_candidates(const CorpusBundle& corpus,
                                              EmbeddingProvider& provider);

KeywordMatrix matrix_from_candidates(const std::vector<DocCandidates>& candidates, int n);

/// Top-`top_k` words per topic of a fitted model.
TopicDescriptions describe_topics(const TopicModel& model, int top_k = 10);

// ---- run directories ----

/// Exclusive ownership of an output directory for the duration of a command.
class DirLock {
public:
    explicit DirLock(const std::filesystem::path& dir);
    ~DirLock();
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::filesystem::path path_;
};

struct ManifestBuilder {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, std::string>> input_digests;
    std::vector<std::pair<std::string, double>> timings_seconds;
    std::vector<std::string> warnings;

    void write(const std::filesystem::path& dir) const;
};

// ---- CLI stage drivers ----

struct FitOptions {
    std::filesystem::path corpus;
    std::string embeddings;  // provider spec
    TokenizerOptions tokenizer;
    int n_keywords = 15;
    SolverConfig solver;
    bool dedupe = false;
    std::filesystem::path out;
};

struct DynamicOptions {
    std::filesystem::path model_dir;
    std::string slice_width = "6h";
    std::optional<std::string> origin;  // ISO-8601; default: earliest, hour-truncated
    SolverConfig solver;
    std::filesystem::path out;
};

struct InfodynOptions {
    std::filesystem::path dynamic_dir;
    int window = 12;
    int span = 56;
    int degree = 2;
    std::optional<std::filesystem::path> events;
    std::filesystem::path out;
};

struct EvalOptions {
    std::filesystem::path model_dir;
    std::filesystem::path corpus;
    std::string embeddings;
    TokenizerOptions tokenizer;
    bool dedupe = false;
    int top_k = 10;
    std::uint64_t seed = 0;
    std::filesystem::path out;  // metrics.json path
};

struct SweepOptions {
    std::filesystem::path corpus;
    std::string embeddings;
    TokenizerOptions tokenizer;
    int n_from = 5, n_to = 100, n_step = 5;
    SolverConfig solver;
    bool dedupe = false;
    std::filesystem::path out;  // CSV path
};

void run_fit(const FitOptions& opts);
void run_dynamic(const DynamicOptions& opts);
void run_infodyn(const InfodynOptions& opts);
void run_eval(const EvalOptions& opts);
void run_sweep(const SweepOptions& opts);

}  // namespace keynmf
