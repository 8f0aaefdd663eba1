#pragma once

#include <Eigen/Core>

#include "idd/errors.hpp"

namespace idd {

/// A weighted point cloud in R^d representing one observed batch.
///
/// Invariants enforced at construction:
///  - weights are strictly positive and sum to 1 within 1e-12
///    (zero-weight atoms are pruned, negative weights are an error);
///  - all support points are finite;
///  - duplicate atoms (identical coordinates) are merged, weights summed.
class EmpiricalMeasure {
  public:
    /// support: n x d matrix, one atom per row. weights: length n.
    EmpiricalMeasure(Eigen::MatrixXd support, Eigen::VectorXd weights);

    /// Uniform weights 1/n over the given points.
    static EmpiricalMeasure uniform(Eigen::MatrixXd support);

    const Eigen::MatrixXd& support() const { return support_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    Eigen::Index size() const { return support_.rows(); }
    Eigen::Index dim() const { return support_.cols(); }

  private:
    Eigen::MatrixXd support_;
    Eigen::VectorXd weights_;
};

}  // namespace idd
