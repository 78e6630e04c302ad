#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "keynmf/corpus.hpp"
#include "keynmf/embed.hpp"
#include "keynmf/matrix_io.hpp"

namespace keynmf {

/// Ordered top-word lists, one per topic; words within one list distinct.
struct TopicDescriptions {
    std::vector<std::vector<std::string>> topics;
};

/// Fraction of unique words across all lists over total word slots.
double diversity(const TopicDescriptions& desc);

/// Mean over topics of the mean pairwise cosine similarity among each topic's
/// top words (i < j pairs). External coherence when the provider is the
/// pretrained encoder, internal when it is corpus-trained vectors.
double embedding_coherence(const TopicDescriptions& desc, EmbeddingProvider& provider);

/// Per-topic breakdown of the same quantity.
std::vector<double> embedding_coherence_per_topic(const TopicDescriptions& desc,
                                                  EmbeddingProvider& provider);

/// Corpus-trained word vectors: positive-PMI co-occurrence counts over a
/// symmetric window, factorized with truncated SVD.
std::unordered_map<std::string, EmbeddingVector> train_internal_embeddings(
    const std::vector<TokenizedDocument>& docs, int dim, int window = 10);

/// Mean over topics of mean pairwise NPMI from sliding-window co-occurrence
/// counts on the reference corpus; never-co-occurring pairs contribute -1.
double npmi_coherence(const TopicDescriptions& desc,
                      const std::vector<TokenizedDocument>& reference, int window = 10);

std::vector<double> npmi_coherence_per_topic(const TopicDescriptions& desc,
                                             const std::vector<TokenizedDocument>& reference,
                                             int window = 10);

}  // namespace keynmf
