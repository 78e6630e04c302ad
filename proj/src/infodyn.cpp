#include "keynmf/infodyn.hpp"

#include <algorithm>
#include <cmath>

namespace keynmf {

namespace {

void check_distribution(const Eigen::VectorXd& p, const char* name) {
    if ((p.array() < 0.0).any())
        throw Error(std::string("jsd: ") + name + " has a negative entry");
    if (std::abs(p.sum() - 1.0) > 1e-9)
        throw Error(std::string("jsd: ") + name + " does not sum to 1");
}

/// Least-squares polynomial fit over one segment, evaluated at its points.
/// Abscissae are mapped to [-1, 1] to keep the Vandermonde well conditioned.
Eigen::VectorXd poly_fit_segment(const std::vector<double>& signal, std::size_t start,
                                 std::size_t len, int degree) {
    Eigen::MatrixXd vand(len, degree + 1);
    Eigen::VectorXd y(len);
    for (std::size_t i = 0; i < len; ++i) {
        double x = len > 1 ? -1.0 + 2.0 * static_cast<double>(i) / (len - 1) : 0.0;
        double pow = 1.0;
        for (int d = 0; d <= degree; ++d) {
            vand(static_cast<Eigen::Index>(i), d) = pow;
            pow *= x;
        }
        y[static_cast<Eigen::Index>(i)] = signal[start + i];
    }
    Eigen::VectorXd coef = vand.colPivHouseholderQr().solve(y);
    return vand * coef;
}

}  // namespace

double jsd(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) throw Error("jsd: length mismatch");
    check_distribution(p, "p");
    check_distribution(q, "q");
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) total += 0.5 * p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) total += 0.5 * q[i] * std::log2(q[i] / m);
    }
    return std::clamp(total, 0.0, 1.0);
}

double novelty(const std::vector<Eigen::VectorXd>& series, std::size_t t, int n) {
    if (n < 1) throw Error("novelty: window must be >= 1");
    if (t >= series.size()) throw Error("novelty: index out of range");
    if (t < static_cast<std::size_t>(n))
        throw Error("novelty undefined at t=" + std::to_string(t) + " with window " +
                    std::to_string(n));
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += jsd(series[t], series[t - j]);
    return total / n;
}

double transience(const std::vector<Eigen::VectorXd>& series, std::size_t t, int n) {
    if (n < 1) throw Error("transience: window must be >= 1");
    if (t >= series.size()) throw Error("transience: index out of range");
    if (t + n >= series.size())
        throw Error("transience undefined at t=" + std::to_string(t) + " with window " +
                    std::to_string(n));
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += jsd(series[t], series[t + j]);
    return total / n;
}

SignalSeries resonance_series(const DenseMatrix& p_hat, int n) {
    if (n < 1) throw Error("resonance_series: window must be >= 1");
    const std::size_t count = static_cast<std::size_t>(p_hat.rows());
    if (count < static_cast<std::size_t>(2 * n + 1))
        throw Error("resonance_series requires at least " + std::to_string(2 * n + 1) +
                    " slices, got " + std::to_string(count));

    std::vector<Eigen::VectorXd> rows;
    rows.reserve(count);
    for (Eigen::Index r = 0; r < p_hat.rows(); ++r) rows.push_back(p_hat.row(r).transpose());

    SignalSeries series;
    series.window = n;
    series.novelty.assign(count, std::nullopt);
    series.transience.assign(count, std::nullopt);
    series.resonance.assign(count, std::nullopt);
    for (std::size_t t = 0; t < count; ++t) {
        if (t >= static_cast<std::size_t>(n)) series.novelty[t] = novelty(rows, t, n);
        if (t + n < count) series.transience[t] = transience(rows, t, n);
        if (series.novelty[t] && series.transience[t])
            series.resonance[t] = *series.novelty[t] - *series.transience[t];
    }
    return series;
}

std::vector<double> adaptive_filter(const std::vector<double>& signal, int span, int degree) {
    if (span < 1) throw Error("adaptive_filter: span must be >= 1");
    if (degree < 0) throw Error("adaptive_filter: degree must be >= 0");
    const std::size_t len = 2 * static_cast<std::size_t>(span) + 1;
    if (signal.size() < len)
        throw Error("adaptive_filter: signal length " + std::to_string(signal.size()) +
                    " is below the minimum " + std::to_string(len));

    // segment starts step by `span`, so neighbors overlap by span+1 points;
    // a final segment is anchored to the signal end when the last step falls short
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + len <= signal.size(); s += static_cast<std::size_t>(span))
        starts.push_back(s);
    if (starts.back() + len < signal.size()) starts.push_back(signal.size() - len);

    std::vector<double> out(signal.size(), 0.0);
    std::size_t covered = 0;  // exclusive end of the region already written
    for (std::size_t si = 0; si < starts.size(); ++si) {
        std::size_t start = starts[si];
        Eigen::VectorXd fit = poly_fit_segment(signal, start, len, degree);
        std::size_t overlap = si == 0 ? 0 : covered - start;
        for (std::size_t i = 0; i < len; ++i) {
            std::size_t pos = start + i;
            if (i < overlap) {
                // linear cross-fade across the overlap
                double w_new = static_cast<double>(i) / (overlap - 1);
                out[pos] = (1.0 - w_new) * out[pos] + w_new * fit[static_cast<Eigen::Index>(i)];
            } else {
                out[pos] = fit[static_cast<Eigen::Index>(i)];
            }
        }
        covered = start + len;
    }
    return out;
}

void smooth_signals(SignalSeries& series, int span, int degree) {
    series.span = span;
    auto smooth_one = [&](const std::vector<std::optional<double>>& raw,
                          std::vector<std::optional<double>>& smooth) {
        smooth.assign(raw.size(), std::nullopt);
        std::size_t first = 0;
        while (first < raw.size() && !raw[first]) ++first;
        std::size_t last = first;
        while (last < raw.size() && raw[last]) ++last;
        std::vector<double> values;
        values.reserve(last - first);
        for (std::size_t i = first; i < last; ++i) values.push_back(*raw[i]);
        auto filtered = adaptive_filter(values, span, degree);
        for (std::size_t i = 0; i < filtered.size(); ++i) smooth[first + i] = filtered[i];
    };
    smooth_one(series.novelty, series.novelty_smooth);
    smooth_one(series.resonance, series.resonance_smooth);
}

}  // namespace keynmf
