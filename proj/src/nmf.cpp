#include "keynmf/nmf.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace keynmf {

namespace {

constexpr double kTiny = 1e-12;

double frob2(const SparseMatrix& m) {
    double total = 0.0;
    for (int r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) total += it.value() * it.value();
    return total;
}

/// <M, WH> over the sparse support of M.
double cross_term(const SparseMatrix& m, const DenseMatrix& w, const DenseMatrix& h) {
    double total = 0.0;
    for (int r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            total += it.value() * w.row(it.row()).dot(h.col(it.col()));
    return total;
}

/// One Gauss-Seidel sweep over the rows of H; W fixed. Returns nothing, H is
/// updated in place. Rows whose W column has zero energy are skipped.
void sweep_h(const SparseMatrix& m, const DenseMatrix& w, DenseMatrix& h) {
    const DenseMatrix wtw = w.transpose() * w;
    const DenseMatrix wtm = w.transpose() * m;
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
        double denom = wtw(j, j);
        if (denom <= kTiny) continue;
        h.row(j) = (h.row(j) + (wtm.row(j) - wtw.row(j) * h) / denom).cwiseMax(0.0);
    }
}

/// One Gauss-Seidel sweep over the columns of W; H fixed.
void sweep_w(const SparseMatrix& m, DenseMatrix& w, const DenseMatrix& h) {
    const DenseMatrix hht = h * h.transpose();
    const DenseMatrix mht = m * h.transpose();
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double denom = hht(j, j);
        if (denom <= kTiny) continue;
        w.col(j) = (w.col(j) + (mht.col(j) - w * hht.col(j)) / denom).cwiseMax(0.0);
    }
}

void nndsvd_init(const SparseMatrix& m, int k, DenseMatrix& w, DenseMatrix& h) {
    DenseMatrix dense(m);
    Eigen::BDCSVD<DenseMatrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& u = svd.matrixU();
    const auto& v = svd.matrixV();
    const auto& s = svd.singularValues();
    int rank = static_cast<int>(s.size());

    w.setZero(m.rows(), k);
    h.setZero(k, m.cols());
    if (rank > 0 && s[0] > 0.0) {
        double f = std::sqrt(s[0]);
        w.col(0) = f * u.col(0).cwiseAbs();
        h.row(0) = f * v.col(0).cwiseAbs().transpose();
    }
    for (int j = 1; j < std::min(k, rank); ++j) {
        if (s[j] <= 0.0) break;
        Eigen::VectorXd xp = u.col(j).cwiseMax(0.0);
        Eigen::VectorXd xn = (-u.col(j)).cwiseMax(0.0);
        Eigen::VectorXd yp = v.col(j).cwiseMax(0.0);
        Eigen::VectorXd yn = (-v.col(j)).cwiseMax(0.0);
        double mp = xp.norm() * yp.norm();
        double mn = xn.norm() * yn.norm();
        if (mp <= 0.0 && mn <= 0.0) continue;
        Eigen::VectorXd uu, vv;
        double sigma;
        if (mp >= mn) {  // ties go to the positive part, for determinism
            uu = xp / xp.norm();
            vv = yp / yp.norm();
            sigma = mp;
        } else {
            uu = xn / xn.norm();
            vv = yn / yn.norm();
            sigma = mn;
        }
        double f = std::sqrt(s[j] * sigma);
        w.col(j) = f * uu;
        h.row(j) = f * vv.transpose();
    }

    // NNDSVDa variant: zeros filled with the matrix mean
    double mean = m.rows() * m.cols() > 0
                      ? m.sum() / static_cast<double>(m.rows() * m.cols())
                      : 0.0;
    if (mean > 0.0) {
        w = (w.array() <= 0.0).select(mean, w);
        h = (h.array() <= 0.0).select(mean, h);
    }
}

void random_init(const SparseMatrix& m, const SolverConfig& cfg, DenseMatrix& w,
                 DenseMatrix& h) {
    double mean = m.rows() * m.cols() > 0
                      ? m.sum() / static_cast<double>(m.rows() * m.cols())
                      : 0.0;
    double scale = std::sqrt(std::max(mean, kTiny) / cfg.k);
    SplitMix64 rng(cfg.seed ^ 0x6b65796e6d66ULL);
    w.resize(m.rows(), cfg.k);
    h.resize(cfg.k, m.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * rng.next_uniform();
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = scale * rng.next_uniform();
}

bool converged(double prev, double cur, double loss0, double rel_tol) {
    return (prev - cur) / std::max(loss0, kTiny) < rel_tol;
}

}  // namespace

double reconstruction_loss(const SparseMatrix& m, const DenseMatrix& w,
                           const DenseMatrix& h) {
    double gram = ((w.transpose() * w).cwiseProduct(h * h.transpose())).sum();
    double loss = frob2(m) - 2.0 * cross_term(m, w, h) + gram;
    return std::max(loss, 0.0);
}

TopicModel fit_nmf(const KeywordMatrix& m, const SolverConfig& cfg) {
    if (cfg.k < 1) throw Error("fit_nmf: k must be >= 1");
    if (cfg.rel_tol <= 0.0) throw Error("fit_nmf: rel_tol must be positive");
    for (int r = 0; r < m.cells.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m.cells, r); it; ++it) {
            if (!std::isfinite(it.value()))
                throw Error("fit_nmf: non-finite cell in keyword matrix");
            if (it.value() < 0.0) throw Error("fit_nmf: negative cell in keyword matrix");
        }
    }

    TopicModel model;
    model.k = cfg.k;
    model.vocabulary = m.vocabulary;

    if (cfg.init == NmfInit::Nndsvd)
        nndsvd_init(m.cells, cfg.k, model.W, model.H);
    else
        random_init(m.cells, cfg, model.W, model.H);

    double loss = reconstruction_loss(m.cells, model.W, model.H);
    model.loss_history.push_back(loss);
    double loss0 = loss;

    int iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
        sweep_h(m.cells, model.W, model.H);
        sweep_w(m.cells, model.W, model.H);
        double next = reconstruction_loss(m.cells, model.W, model.H);
        model.loss_history.push_back(next);
        bool stop = converged(loss, next, loss0, cfg.rel_tol);
        loss = next;
        if (stop) {
            ++iter;
            break;
        }
    }
    model.iterations_run = iter;
    model.final_loss = loss;

    // fold the scale indeterminacy into W: unit-L2 rows of H
    for (int j = 0; j < cfg.k; ++j) {
        double norm = model.H.row(j).norm();
        if (norm > 0.0) {
            model.H.row(j) /= norm;
            model.W.col(j) *= norm;
        }
    }
    return model;
}

DenseMatrix solve_h_fixed_w(const SparseMatrix& m_t, const DenseMatrix& w_t,
                            const SolverConfig& cfg, const DenseMatrix* h_init) {
    if (m_t.rows() != w_t.rows())
        throw Error("solve_h_fixed_w: row counts of M_t and W_t differ");
    if ((w_t.array() < 0.0).any()) throw Error("solve_h_fixed_w: W_t must be non-negative");
    int k = static_cast<int>(w_t.cols());

    DenseMatrix h;
    if (h_init) {
        if (h_init->rows() != k || h_init->cols() != m_t.cols())
            throw Error("solve_h_fixed_w: warm-start H has wrong shape");
        h = *h_init;
    } else {
        h = DenseMatrix::Zero(k, m_t.cols());
    }
    // dead topics keep an all-zero row regardless of warm start
    for (int j = 0; j < k; ++j)
        if (w_t.rows() == 0 || w_t.col(j).squaredNorm() <= kTiny) h.row(j).setZero();

    double loss = reconstruction_loss(m_t, w_t, h);
    double loss0 = loss;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        sweep_h(m_t, w_t, h);
        double next = reconstruction_loss(m_t, w_t, h);
        bool stop = converged(loss, next, loss0, cfg.rel_tol);
        loss = next;
        if (stop) break;
    }
    return h;
}

DenseMatrix transform(const KeywordMatrix& docs_m, const TopicModel& model,
                      const SolverConfig& cfg) {
    // align columns to the model vocabulary; OOV keywords are dropped
    std::unordered_map<std::string, int> model_col;
    model_col.reserve(model.vocabulary.size());
    for (std::size_t i = 0; i < model.vocabulary.size(); ++i)
        model_col[model.vocabulary[i]] = static_cast<int>(i);

    std::vector<int> col_map(docs_m.vocabulary.size(), -1);
    bool any = false;
    for (std::size_t i = 0; i < docs_m.vocabulary.size(); ++i) {
        auto it = model_col.find(docs_m.vocabulary[i]);
        if (it != model_col.end()) {
            col_map[i] = it->second;
            any = true;
        }
    }
    if (!any && !docs_m.vocabulary.empty())
        throw Error("transform: no overlap between document and model vocabularies");

    std::vector<Eigen::Triplet<double>> triplets;
    for (int r = 0; r < docs_m.cells.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(docs_m.cells, r); it; ++it)
            if (col_map[static_cast<std::size_t>(it.col())] >= 0)
                triplets.emplace_back(static_cast<int>(it.row()),
                                      col_map[static_cast<std::size_t>(it.col())], it.value());
    SparseMatrix aligned(docs_m.cells.rows(),
                         static_cast<Eigen::Index>(model.vocabulary.size()));
    aligned.setFromTriplets(triplets.begin(), triplets.end());

    DenseMatrix w = DenseMatrix::Zero(aligned.rows(), model.k);
    double loss = reconstruction_loss(aligned, w, model.H);
    double loss0 = loss;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        sweep_w(aligned, w, model.H);
        double next = reconstruction_loss(aligned, w, model.H);
        bool stop = converged(loss, next, loss0, cfg.rel_tol);
        loss = next;
        if (stop) break;
    }
    return w;
}

}  // namespace keynmf
