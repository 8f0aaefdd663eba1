#pragma once

// Shared statistical helpers for the test suites. Everything here is an
// independent oracle: no code path from the library under test.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testutil {

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Asymptotic KS critical value c(alpha)/sqrt(n); c(0.01) = 1.628.
inline double ks_critical(double alpha, std::size_t n) {
    const double c = alpha <= 0.01 ? 1.628 : (alpha <= 0.05 ? 1.358 : 1.224);
    return c / std::sqrt(static_cast<double>(n));
}

/// Pearson chi-square GOF statistic for binned counts vs expected counts.
/// Bins with expected counts below `min_expected` are pooled leftward.
inline double chi2_gof_pooled(std::vector<double> observed, std::vector<double> expected,
                              double min_expected, int& dof) {
    // pool sparse bins from the right
    for (std::size_t i = expected.size(); i-- > 1;) {
        if (expected[i] < min_expected) {
            expected[i - 1] += expected[i];
            observed[i - 1] += observed[i];
            expected.erase(expected.begin() + static_cast<std::ptrdiff_t>(i));
            observed.erase(observed.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    dof = static_cast<int>(expected.size()) - 1;
    return stat;
}

/// Two-sample energy distance between row sets a and b.
inline double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    auto mean_cross = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < y.rows(); ++j)
                s += (x.row(i) - y.row(j)).norm();
        return s / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
    };
    return 2.0 * mean_cross(a, b) - mean_cross(a, a) - mean_cross(b, b);
}

/// Permutation null quantile of the energy distance between equally sized
/// splits of the pooled rows.
inline double energy_null_quantile(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   double quantile, int n_perm, std::mt19937_64& gen) {
    Eigen::MatrixXd pool(a.rows() + b.rows(), a.cols());
    pool << a, b;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(pool.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(n_perm));
    for (int p = 0; p < n_perm; ++p) {
        std::shuffle(idx.begin(), idx.end(), gen);
        Eigen::MatrixXd pa(a.rows(), a.cols()), pb(b.rows(), b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i) pa.row(i) = pool.row(idx[static_cast<std::size_t>(i)]);
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            pb.row(i) = pool.row(idx[static_cast<std::size_t>(a.rows() + i)]);
        stats.push_back(energy_distance(pa, pb));
    }
    std::sort(stats.begin(), stats.end());
    const std::size_t k = static_cast<std::size_t>(quantile * (n_perm - 1));
    return stats[k];
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double var = 0.0;
    for (double x : xs) var += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(var / static_cast<double>(xs.size() - 1));
    return out;
}

/// Pearson correlation of two columns.
inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double mx = x.mean(), my = y.mean();
    Eigen::ArrayXd cx = x.array() - mx, cy = y.array() - my;
    return (cx * cy).sum() / std::sqrt((cx * cx).sum() * (cy * cy).sum());
}

}  // namespace testutil
