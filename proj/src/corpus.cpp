#include "keynmf/corpus.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace keynmf {

namespace {

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_separator(char32_t cp) {
    if (cp <= 0x7f) {
        return std::isspace(static_cast<int>(cp)) || std::ispunct(static_cast<int>(cp));
    }
    // whitespace
    if (cp == 0xa0 || (cp >= 0x2000 && cp <= 0x200b) || cp == 0x3000 || cp == 0xfeff)
        return true;
    // general punctuation, CJK symbols/punctuation, fullwidth/halfwidth forms
    if (cp >= 0x2010 && cp <= 0x205e) return true;
    if (cp == 0xb7 || cp == 0xab || cp == 0xbb) return true;
    if (cp >= 0x3001 && cp <= 0x303f) return true;
    if ((cp >= 0xff01 && cp <= 0xff0f) || (cp >= 0xff1a && cp <= 0xff20) ||
        (cp >= 0xff3b && cp <= 0xff40) || (cp >= 0xff5b && cp <= 0xff65))
        return true;
    return false;
}

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;  // Latin-1
    return cp;
}

bool all_separators(const std::u32string& token) {
    return std::all_of(token.begin(), token.end(), is_separator);
}

}  // namespace

Document make_document(std::string id, std::string text, std::int64_t timestamp,
                       std::string source) {
    if (id.empty()) throw Error("document id must be non-empty");
    if (text.empty() || is_blank(text))
        throw Error("document '" + id + "' has empty text");
    return Document{std::move(id), std::move(text), timestamp, std::move(source)};
}

Segmenter Segmenter::unicode() {
    Segmenter s;
    s.kind_ = SegmenterKind::Unicode;
    return s;
}

Segmenter Segmenter::dictionary(const std::vector<std::string>& lexicon) {
    if (lexicon.empty()) throw Error("dictionary segmenter requires a non-empty lexicon");
    Segmenter s;
    s.kind_ = SegmenterKind::Dictionary;
    for (const auto& entry : lexicon) {
        std::u32string cps = utf8_decode(entry);
        if (cps.empty()) continue;
        s.max_entry_len_ = std::max(s.max_entry_len_, cps.size());
        s.lexicon_.insert(std::move(cps));
    }
    if (s.lexicon_.empty()) throw Error("dictionary segmenter requires a non-empty lexicon");
    return s;
}

std::vector<std::string> Segmenter::segment(const std::string& text) const {
    std::u32string cps = utf8_decode(text);
    std::vector<std::string> out;
    if (kind_ == SegmenterKind::Unicode) {
        std::u32string current;
        for (char32_t cp : cps) {
            if (is_separator(cp)) {
                if (!current.empty()) {
                    out.push_back(utf8_encode(current));
                    current.clear();
                }
            } else {
                current.push_back(to_lower(cp));
            }
        }
        if (!current.empty()) out.push_back(utf8_encode(current));
        return out;
    }
    // greedy longest match; unmatched characters become single-char tokens so
    // the output concatenates back to the input
    std::size_t i = 0;
    while (i < cps.size()) {
        std::size_t longest = 0;
        std::size_t try_len = std::min(max_entry_len_, cps.size() - i);
        for (std::size_t len = try_len; len >= 1; --len) {
            if (lexicon_.count(cps.substr(i, len))) {
                longest = len;
                break;
            }
        }
        if (longest == 0) longest = 1;
        out.push_back(utf8_encode(cps.substr(i, longest)));
        i += longest;
    }
    return out;
}

TokenizedDocument tokenize(const Document& doc, const Segmenter& segmenter,
                           const std::set<std::string>& stopwords) {
    TokenizedDocument result;
    result.doc_id = doc.id;
    for (auto& token : segmenter.segment(doc.text)) {
        if (token.empty()) continue;
        if (all_separators(utf8_decode(token))) continue;
        if (stopwords.count(token)) continue;
        result.tokens.push_back(std::move(token));
    }
    return result;
}

std::vector<Document> ingest_jsonl(const std::filesystem::path& path, DedupePolicy policy) {
    if (!std::filesystem::exists(path))
        throw Error("corpus file does not exist: " + path.string());
    std::istringstream in(read_file(path));
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("malformed JSON on line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object())
            throw Error("line " + std::to_string(line_no) + " is not a JSON object");
        for (const char* key : {"id", "text", "timestamp", "source"}) {
            if (!obj.contains(key) || !obj[key].is_string())
                throw Error("line " + std::to_string(line_no) + " missing string field '" +
                            key + "'");
        }
        std::int64_t ts;
        try {
            ts = parse_iso8601(obj["timestamp"].get<std::string>());
        } catch (const Error& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
        Document doc;
        try {
            doc = make_document(obj["id"].get<std::string>(), obj["text"].get<std::string>(),
                                ts, obj["source"].get<std::string>());
        } catch (const Error& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
        std::string key = policy == DedupePolicy::RejectDuplicateIdTimestamp
                              ? doc.id + "\x1f" + std::to_string(doc.timestamp)
                              : doc.id;
        if (!seen.insert(key).second) {
            if (policy == DedupePolicy::KeepFirstPerId) continue;
            throw Error("duplicate document id '" + doc.id + "' on line " +
                        std::to_string(line_no));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::map<std::int64_t, std::vector<std::size_t>> slice_corpus(
    const std::vector<Document>& docs, const TimeSliceSpec& spec) {
    if (spec.width_seconds <= 0) throw Error("slice width must be positive");
    std::map<std::int64_t, std::vector<std::size_t>> slices;
    std::int64_t max_index = -1;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].timestamp < spec.origin)
            throw Error("document '" + docs[i].id + "' predates the slice origin");
        std::int64_t index = (docs[i].timestamp - spec.origin) / spec.width_seconds;
        slices[index].push_back(i);
        max_index = std::max(max_index, index);
    }
    // materialize empty slices between occupied ones
    for (std::int64_t t = 0; t <= max_index; ++t) slices.try_emplace(t);
    return slices;
}

}  // namespace keynmf
