#pragma once

#include <Eigen/Core>

#include "idd/errors.hpp"

namespace idd {

/// Default tolerance for coupling marginal feasibility.
inline constexpr double kMarginalTol = 1e-7;

/// A transport plan between two empirical measures: an n_source x n_target
/// matrix of nonnegative masses whose row sums equal the source weights and
/// whose column sums equal the target weights.
struct Coupling {
    Eigen::MatrixXd plan;
    Eigen::VectorXd source_marginal;
    Eigen::VectorXd target_marginal;
    /// Entropic regularization used to produce the plan; 0 means exact.
    double regularization = 0.0;

    /// Largest absolute row/column marginal deviation.
    double marginal_violation() const {
        double row = (plan.rowwise().sum() - source_marginal).cwiseAbs().maxCoeff();
        double col = (plan.colwise().sum().transpose() - target_marginal).cwiseAbs().maxCoeff();
        return row > col ? row : col;
    }

    /// Throws DimensionError on shape mismatch or if any entry is negative
    /// or a marginal deviates by more than tol.
    void validate(double tol = kMarginalTol) const {
        if (plan.rows() != source_marginal.size() || plan.cols() != target_marginal.size())
            throw DimensionError("coupling plan shape does not match marginals");
        if (plan.minCoeff() < 0.0)
            throw DimensionError("coupling has negative entries");
        if (marginal_violation() > tol)
            throw DimensionError("coupling violates marginal constraints");
    }
};

}  // namespace idd
