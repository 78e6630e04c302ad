#pragma once

#include <map>
#include <optional>

#include "keynmf/nmf.hpp"

namespace keynmf {

/// Global model plus per-slice topic-term matrices, temporal importances and
/// L1-normalized pseudo-distributions. Slices with no topic mass get a uniform
/// P-hat row and are listed in degenerate_slices.
struct DynamicModel {
    TopicModel base;
    std::vector<std::int64_t> slices;       // ascending slice indices
    std::vector<DenseMatrix> h_t;           // per-slice k x vocab
    DenseMatrix importance;                 // slices x k
    DenseMatrix p_hat;                      // slices x k, rows sum to 1
    std::vector<std::int64_t> degenerate_slices;
};

/// slice_map maps slice index -> row positions in m; it must cover exactly the
/// rows of m, each row once. The global W rows are never re-estimated; each
/// slice solves H_t against its W row subset, warm-started from the global H.
DynamicModel fit_dynamic(const KeywordMatrix& m,
                         const std::map<std::int64_t, std::vector<std::size_t>>& slice_map,
                         const SolverConfig& cfg);

/// Same as fit_dynamic but reuses an already fitted global model instead of
/// refitting it.
DynamicModel dynamic_from_model(const KeywordMatrix& m, TopicModel base,
                                const std::map<std::int64_t, std::vector<std::size_t>>& slice_map,
                                const SolverConfig& cfg);

/// Descending-weight top words of one topic, ties lexicographic. slice selects
/// an H_t row set; omit it for the global H.
std::vector<std::pair<std::string, double>> topic_top_words(
    const DynamicModel& model, int topic, std::optional<std::size_t> slice_pos, int top_k);

std::vector<std::pair<std::string, double>> topic_top_words(const TopicModel& model,
                                                            int topic, int top_k);

}  // namespace keynmf
