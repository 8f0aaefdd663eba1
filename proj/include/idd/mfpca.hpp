#pragma once

#include <Eigen/Core>
#include <vector>

#include "idd/errors.hpp"
#include "idd/tangent.hpp"

namespace idd {

/// Fitted functional PCA model over tangent fields in weighted L2.
///
/// Eigenfields are orthonormal in the weighted inner product and eigenvalues
/// are strictly positive and non-increasing; rank r <= n0 - 1.
struct EigenBasis {
    TangentField mean_field;                  // sample mean of the fitted fields
    Eigen::VectorXd eigenvalues;              // lambda_1 >= ... >= lambda_r > 0
    std::vector<TangentField> eigenfields;    // r orthonormal fields
    int truncation = 1;                       // K, number of retained components
    double total_variance = 0.0;              // sum of all r eigenvalues
    int n_samples = 0;                        // n0 used for the fit

    Eigen::Index rank() const { return eigenvalues.size(); }
};

/// Score-space and residual statistics for one monitored field.
struct ChartStatistics {
    double t2 = 0.0;
    double spe = 0.0;
    Eigen::VectorXd scores;  // leading K scores
};

struct MfpcaConfig {
    double variance_fraction = 0.9;  // explained-variance rule for K
    int k_override = 0;              // > 0 fixes K directly
};

/// Weighted L2 inner product sum_i w_i f_i . g_i. Fields must share the atom
/// grid and weights.
double weighted_inner(const TangentField& f, const TangentField& g);

/// Weighted squared norm |f|^2 = <f, f>.
double weighted_norm2(const TangentField& f);

/// Fit the eigenbasis from n0 >= 3 fields on a common grid via the Gram
/// matrix route: G_st = <v~_s, v~_t> / (n0 - 1), eigendecomposed and mapped
/// back to orthonormal eigenfields. Eigenvalues below lambda_1 * 1e-10 are
/// dropped as numerical rank noise. K is the smallest count explaining
/// variance_fraction of the total, capped at min(r, n0/2), unless overridden.
EigenBasis fit_basis(const std::vector<TangentField>& fields, const MfpcaConfig& config = {});

/// Scores of (field - mean) on all r eigenfields.
Eigen::VectorXd project_scores(const EigenBasis& basis, const TangentField& field);

/// sum_{m<=K} scores_m^2 / lambda_m over the leading K components.
double t2_statistic(const EigenBasis& basis, const Eigen::VectorXd& scores);

/// Residual energy |field - mean|^2 - sum_{m<=K} scores_m^2, clamped at 0.
/// Includes energy outside the fitted rank so novel directions register.
double spe_statistic(const EigenBasis& basis, const TangentField& field);

/// Convenience: scores, T2 and SPE for one field.
ChartStatistics chart_statistics(const EigenBasis& basis, const TangentField& field);

/// sum_{m>K} lambda_m.
double tail_energy(const EigenBasis& basis, int k);

/// Smallest K whose cumulative variance reaches `fraction` of the total.
/// fraction must lie in (0, 1].
int select_k(const EigenBasis& basis, double fraction);

}  // namespace idd
