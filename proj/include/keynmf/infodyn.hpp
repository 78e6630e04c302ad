#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "keynmf/common.hpp"
#include "keynmf/matrix_io.hpp"

namespace keynmf {

/// Jensen-Shannon divergence in base 2, so the result lies in [0, 1].
/// Both inputs must be probability vectors of the same length.
double jsd(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Mean JSD between series[t] and its n predecessors. Defined for t >= n.
double novelty(const std::vector<Eigen::VectorXd>& series, std::size_t t, int n);

/// Mean JSD between series[t] and its n successors.
double transience(const std::vector<Eigen::VectorXd>& series, std::size_t t, int n);

/// Per-time-point signals over a slices x topics pseudo-distribution matrix.
/// Points without enough neighbors are absent, never zero-filled. Smoothed
/// variants are filled by the caller (see smooth_signals) since they need the
/// span parameter.
struct SignalSeries {
    std::vector<std::int64_t> time_points;  // slice start epochs; may be empty
    std::vector<std::optional<double>> novelty;
    std::vector<std::optional<double>> transience;
    std::vector<std::optional<double>> resonance;
    int window = 0;
    std::vector<std::optional<double>> novelty_smooth;
    std::vector<std::optional<double>> resonance_smooth;
    int span = 0;
};

SignalSeries resonance_series(const DenseMatrix& p_hat, int n);

/// Overlapping-segment polynomial smoother: segments of length 2*span+1
/// overlap by span+1 points and are blended linearly in the overlaps.
std::vector<double> adaptive_filter(const std::vector<double>& signal, int span, int degree);

/// Applies adaptive_filter independently to the defined ranges of novelty and
/// resonance. Errors if either defined range is shorter than 2*span+1.
void smooth_signals(SignalSeries& series, int span, int degree);

}  // namespace keynmf
