#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "keynmf/keywords.hpp"
#include "keynmf/matrix_io.hpp"

namespace keynmf {

enum class NmfInit {
    Nndsvd,        // SVD-based non-negative init, zeros filled with the matrix mean
    SeededRandom,  // uniform random from the config seed
};

struct SolverConfig {
    int k = 10;
    int max_iter = 200;
    double rel_tol = 1e-4;
    NmfInit init = NmfInit::Nndsvd;
    std::uint64_t seed = 0;
};

/// Factor pair M ~ W H with W docs x k and H k x vocab, both non-negative.
/// H rows are L2-normalized after fitting with the scale folded into W.
struct TopicModel {
    DenseMatrix W;
    DenseMatrix H;
    std::vector<std::string> vocabulary;
    int k = 0;
    double final_loss = 0.0;
    int iterations_run = 0;
    std::vector<double> loss_history;  // squared Frobenius loss per outer iteration
};

/// Cyclic block coordinate descent on the squared Frobenius loss, alternating
/// full sweeps over H then W with closed-form updates projected to zero.
TopicModel fit_nmf(const KeywordMatrix& m, const SolverConfig& cfg);

/// Coordinate-descent sweeps over H only, W held fixed. Rows of H matching an
/// all-zero W column stay zero. h_init, when given, warm-starts the solve.
DenseMatrix solve_h_fixed_w(const SparseMatrix& m_t, const DenseMatrix& w_t,
                            const SolverConfig& cfg,
                            const DenseMatrix* h_init = nullptr);

/// Projects held-out documents onto a fitted model: coordinate descent over W
/// with H fixed. docs_m columns are aligned to model.vocabulary by name;
/// out-of-vocabulary keywords are dropped.
DenseMatrix transform(const KeywordMatrix& docs_m, const TopicModel& model,
                      const SolverConfig& cfg);

/// Squared Frobenius loss ||M - WH||^2 without forming the dense product.
double reconstruction_loss(const SparseMatrix& m, const DenseMatrix& w, const DenseMatrix& h);

}  // namespace keynmf
