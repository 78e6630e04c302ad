#include "keynmf/dynamic.hpp"

#include <algorithm>

namespace keynmf {

namespace {

std::vector<std::pair<std::string, double>> top_words_of_row(
    const DenseMatrix& h, const std::vector<std::string>& vocabulary, int topic, int top_k) {
    if (topic < 0 || topic >= h.rows()) throw Error("topic index out of range");
    if (top_k < 1) throw Error("top_k must be >= 1");
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(vocabulary.size());
    for (std::size_t i = 0; i < vocabulary.size(); ++i)
        scored.emplace_back(vocabulary[i], h(topic, static_cast<Eigen::Index>(i)));
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > static_cast<std::size_t>(top_k))
        scored.resize(static_cast<std::size_t>(top_k));
    return scored;
}

}  // namespace

DynamicModel fit_dynamic(const KeywordMatrix& m,
                         const std::map<std::int64_t, std::vector<std::size_t>>& slice_map,
                         const SolverConfig& cfg) {
    return dynamic_from_model(m, fit_nmf(m, cfg), slice_map, cfg);
}

DynamicModel dynamic_from_model(const KeywordMatrix& m, TopicModel base,
                                const std::map<std::int64_t, std::vector<std::size_t>>& slice_map,
                                const SolverConfig& cfg) {
    const std::size_t n_rows = static_cast<std::size_t>(m.cells.rows());
    std::vector<int> cover(n_rows, 0);
    for (const auto& [slice, rows] : slice_map) {
        for (auto r : rows) {
            if (r >= n_rows)
                throw Error("slice map references unknown row " + std::to_string(r));
            ++cover[r];
        }
    }
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (cover[r] != 1)
            throw Error("slice map must cover row " + std::to_string(r) + " exactly once");
    }

    DynamicModel model;
    model.base = std::move(base);
    const int k = model.base.k;
    const Eigen::Index n_slices = static_cast<Eigen::Index>(slice_map.size());
    model.importance.setZero(n_slices, k);
    model.p_hat.setZero(n_slices, k);

    Eigen::Index pos = 0;
    for (const auto& [slice, rows] : slice_map) {
        model.slices.push_back(slice);

        // row subsets of the global M and W for this slice
        SparseMatrix m_t(static_cast<Eigen::Index>(rows.size()), m.cells.cols());
        DenseMatrix w_t(static_cast<Eigen::Index>(rows.size()), k);
        std::vector<Eigen::Triplet<double>> triplets;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto src = static_cast<Eigen::Index>(rows[i]);
            w_t.row(static_cast<Eigen::Index>(i)) = model.base.W.row(src);
            for (SparseMatrix::InnerIterator it(m.cells, static_cast<int>(src)); it; ++it)
                triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.col()),
                                      it.value());
        }
        m_t.setFromTriplets(triplets.begin(), triplets.end());

        model.h_t.push_back(solve_h_fixed_w(m_t, w_t, cfg, &model.base.H));

        Eigen::RowVectorXd importance = Eigen::RowVectorXd::Zero(k);
        if (!rows.empty()) importance = w_t.colwise().sum();
        model.importance.row(pos) = importance;
        double total = importance.sum();
        if (total > 0.0) {
            model.p_hat.row(pos) = importance / total;
        } else {
            // no topic mass in this slice: uniform distribution, flagged
            model.p_hat.row(pos).setConstant(1.0 / k);
            model.degenerate_slices.push_back(slice);
        }
        ++pos;
    }
    return model;
}

std::vector<std::pair<std::string, double>> topic_top_words(
    const DynamicModel& model, int topic, std::optional<std::size_t> slice_pos, int top_k) {
    if (!slice_pos) return topic_top_words(model.base, topic, top_k);
    if (*slice_pos >= model.h_t.size()) throw Error("slice position out of range");
    return top_words_of_row(model.h_t[*slice_pos], model.base.vocabulary, topic, top_k);
}

std::vector<std::pair<std::string, double>> topic_top_words(const TopicModel& model,
                                                            int topic, int top_k) {
    return top_words_of_row(model.H, model.vocabulary, topic, top_k);
}

}  // namespace keynmf
