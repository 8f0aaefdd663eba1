#include "idd/empirical_measure.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

namespace idd {

namespace {

constexpr double kWeightSumTol = 1e-12;

// Byte-wise key for exact duplicate detection. -0.0 is normalized to 0.0 so
// the two representations of zero merge.
std::string row_key(const Eigen::MatrixXd& pts, Eigen::Index i) {
    std::string key(static_cast<std::size_t>(pts.cols()) * sizeof(double), '\0');
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
        double v = pts(i, j);
        if (v == 0.0) v = 0.0;
        std::memcpy(key.data() + static_cast<std::size_t>(j) * sizeof(double), &v, sizeof(double));
    }
    return key;
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd support, Eigen::VectorXd weights) {
    if (support.rows() == 0 || support.cols() == 0)
        throw MeasureError("empirical measure needs at least one atom in d >= 1");
    if (weights.size() != support.rows())
        throw MeasureError("weight count does not match atom count");
    if (!support.allFinite())
        throw MeasureError("support contains non-finite coordinates");
    if (!weights.allFinite())
        throw MeasureError("weights contain non-finite values");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (weights[i] < 0.0)
            throw MeasureError("negative weight at atom " + std::to_string(i));
    if (std::abs(weights.sum() - 1.0) > kWeightSumTol)
        throw MeasureError("weights must sum to 1 within 1e-12, got " +
                           std::to_string(weights.sum()));

    // Prune zero-weight atoms and merge exact duplicates, preserving
    // first-occurrence order so atom indices stay predictable.
    std::unordered_map<std::string, Eigen::Index> seen;
    std::vector<Eigen::Index> keep;
    std::vector<double> merged;
    keep.reserve(static_cast<std::size_t>(support.rows()));
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
        if (weights[i] == 0.0) continue;
        auto [it, inserted] = seen.emplace(row_key(support, i), static_cast<Eigen::Index>(keep.size()));
        if (inserted) {
            keep.push_back(i);
            merged.push_back(weights[i]);
        } else {
            merged[static_cast<std::size_t>(it->second)] += weights[i];
        }
    }
    if (keep.empty()) throw MeasureError("all atoms have zero weight");

    support_.resize(static_cast<Eigen::Index>(keep.size()), support.cols());
    weights_.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        support_.row(static_cast<Eigen::Index>(k)) = support.row(keep[k]);
        weights_[static_cast<Eigen::Index>(k)] = merged[k];
    }
}

EmpiricalMeasure EmpiricalMeasure::uniform(Eigen::MatrixXd support) {
    const Eigen::Index n = support.rows();
    if (n == 0) throw MeasureError("empirical measure needs at least one atom");
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    // Compensate the rounding of n * (1/n) so the sum is exactly 1.
    w[n - 1] += 1.0 - w.sum();
    return EmpiricalMeasure(std::move(support), std::move(w));
}

}  // namespace idd
