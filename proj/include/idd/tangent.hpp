#pragma once

#include <Eigen/Core>

namespace idd {

/// Displacement field at the reference atoms: one vector in R^d per atom.
/// Element of the weighted L2 space over the reference measure; ref_weights
/// are shared by every field produced from one model.
struct TangentField {
    Eigen::MatrixXd vectors;      // m x d displacements
    Eigen::VectorXd ref_weights;  // m reference weights

    Eigen::Index atoms() const { return vectors.rows(); }
    Eigen::Index dim() const { return vectors.cols(); }
};

}  // namespace idd
