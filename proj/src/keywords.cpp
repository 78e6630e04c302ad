#include "keynmf/keywords.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace keynmf {

KeywordSet extract_keywords(
    const TokenizedDocument& doc, const EmbeddingVector& doc_vec,
    const std::unordered_map<std::string, EmbeddingVector>& word_vecs, int n) {
    if (n < 1) throw Error("extract_keywords: n must be >= 1");

    // candidates are the distinct tokens of the document
    std::set<std::string> distinct(doc.tokens.begin(), doc.tokens.end());
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(distinct.size());
    for (const auto& word : distinct) {
        auto it = word_vecs.find(word);
        if (it == word_vecs.end())
            throw Error("no word vector for '" + word + "' in document '" + doc.doc_id + "'");
        double sim = cosine_similarity(doc_vec, it->second);
        if (sim > 0.0) scored.emplace_back(word, sim);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > static_cast<std::size_t>(n)) scored.resize(static_cast<std::size_t>(n));
    return KeywordSet{doc.doc_id, std::move(scored)};
}

KeywordMatrix build_keyword_matrix(const std::vector<KeywordSet>& keyword_sets) {
    std::set<std::string> seen_ids;
    std::set<std::string> vocab_set;
    for (const auto& ks : keyword_sets) {
        if (!seen_ids.insert(ks.doc_id).second)
            throw Error("duplicate doc id '" + ks.doc_id + "' in keyword sets");
        for (const auto& [word, sim] : ks.entries) {
            if (sim <= 0.0)
                throw Error("non-positive similarity stored for '" + word + "'");
            vocab_set.insert(word);
        }
    }

    KeywordMatrix m;
    m.vocabulary.assign(vocab_set.begin(), vocab_set.end());
    std::unordered_map<std::string, int> col_of;
    col_of.reserve(m.vocabulary.size());
    for (std::size_t i = 0; i < m.vocabulary.size(); ++i)
        col_of[m.vocabulary[i]] = static_cast<int>(i);

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t row = 0; row < keyword_sets.size(); ++row) {
        m.doc_ids.push_back(keyword_sets[row].doc_id);
        for (const auto& [word, sim] : keyword_sets[row].entries)
            triplets.emplace_back(static_cast<int>(row), col_of.at(word), sim);
    }
    m.cells.resize(static_cast<Eigen::Index>(keyword_sets.size()),
                   static_cast<Eigen::Index>(m.vocabulary.size()));
    m.cells.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

KeywordMatrix build_bow_matrix(const std::vector<TokenizedDocument>& docs, int min_df) {
    if (min_df < 1) throw Error("build_bow_matrix: min_df must be >= 1");

    std::map<std::string, int> doc_freq;
    for (const auto& doc : docs) {
        std::set<std::string> distinct(doc.tokens.begin(), doc.tokens.end());
        for (const auto& word : distinct) ++doc_freq[word];
    }

    KeywordMatrix m;
    std::unordered_map<std::string, int> col_of;
    for (const auto& [word, df] : doc_freq) {
        if (df >= min_df) {
            col_of[word] = static_cast<int>(m.vocabulary.size());
            m.vocabulary.push_back(word);
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t row = 0; row < docs.size(); ++row) {
        m.doc_ids.push_back(docs[row].doc_id);
        std::map<std::string, int> counts;
        for (const auto& token : docs[row].tokens) ++counts[token];
        for (const auto& [word, count] : counts) {
            auto it = col_of.find(word);
            if (it != col_of.end())
                triplets.emplace_back(static_cast<int>(row), it->second,
                                      static_cast<double>(count));
        }
    }
    m.cells.resize(static_cast<Eigen::Index>(docs.size()),
                   static_cast<Eigen::Index>(m.vocabulary.size()));
    m.cells.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

}  // namespace keynmf
