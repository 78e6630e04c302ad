#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "keynmf/corpus.hpp"
#include "keynmf/embed.hpp"
#include "keynmf/matrix_io.hpp"

namespace keynmf {

/// Up-to-N keywords of one document with their cosine similarities, strictly
/// positive and sorted descending; ties broken by lexicographic word order.
struct KeywordSet {
    std::string doc_id;
    std::vector<std::pair<std::string, double>> entries;
};

/// Sparse non-negative document x term matrix. Row order follows the input
/// document order; vocabulary columns are lexicographically sorted.
struct KeywordMatrix {
    std::vector<std::string> doc_ids;
    std::vector<std::string> vocabulary;
    SparseMatrix cells;
};

KeywordSet extract_keywords(
    const TokenizedDocument& doc, const EmbeddingVector& doc_vec,
    const std::unordered_map<std::string, EmbeddingVector>& word_vecs, int n);

KeywordMatrix build_keyword_matrix(const std::vector<KeywordSet>& keyword_sets);

/// Raw term counts, columns restricted to words with document frequency
/// >= min_df. Feeds the plain bag-of-words NMF baseline.
KeywordMatrix build_bow_matrix(const std::vector<TokenizedDocument>& docs, int min_df);

}  // namespace keynmf
