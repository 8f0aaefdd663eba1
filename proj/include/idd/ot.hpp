#pragma once

#include <Eigen/Core>

#include "idd/coupling.hpp"
#include "idd/empirical_measure.hpp"
#include "idd/tangent.hpp"

namespace idd {

/// Pairwise squared Euclidean distances: entry (i, j) = |x_i - y_j|^2.
Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& source, const EmpiricalMeasure& target);

struct SinkhornParams {
    double tol = kMarginalTol;  // max absolute marginal deviation
    int max_iter = 10000;
    int check_every = 5;   // marginal check cadence, in iterations
    // Largest pre-rounding violation the final polytope projection may absorb
    // once per-iteration progress stalls. Looser caps trade plan optimality
    // for speed on clustered geometries; marginals stay exact either way.
    double round_cap = 1e-4;
};

/// Reusable source-side dual potential for sequences of related problems
/// (a fixed source support against a stream of similar targets, or a slowly
/// moving support pair). When the stored size matches the source, iteration
/// starts from it (the target potential is derived from it) and skips the
/// epsilon-scaling ladder; it is updated in place on success.
struct SinkhornWarmStart {
    Eigen::VectorXd f;
};

/// Entropically regularized plan computed with log-domain dual iterations,
/// stable for eps down to about 1e-3 x the median cost. Uses epsilon scaling
/// from the cost scale down to the target eps, and finishes with a rounding
/// step onto the transport polytope so the returned coupling satisfies the
/// marginal invariants exactly. Throws ConvergenceError (carrying the final
/// violation) when the iteration ends too far from feasibility for rounding
/// to be a small correction.
Coupling sinkhorn_plan(const EmpiricalMeasure& source, const EmpiricalMeasure& target, double eps,
                       const SinkhornParams& params = {}, SinkhornWarmStart* warm = nullptr);

/// Scale x median of the nonzero cost entries; the conventional way to pick
/// eps relative to the problem's length scale. Falls back to `scale` when
/// every entry is zero.
double default_epsilon(const Eigen::MatrixXd& cost, double scale = 5e-3);

/// Exact optimal plan in one dimension: north-west-corner coupling on
/// value-sorted supports (the monotone/quantile coupling, optimal for
/// quadratic cost). Throws DimensionError unless d == 1.
Coupling exact_plan_1d(const EmpiricalMeasure& source, const EmpiricalMeasure& target);

/// Exhaustive assignment oracle for equal-weight measures with
/// n_source == n_target <= 8. Returns the lexicographically smallest optimal
/// permutation as a coupling. Throws OracleSizeError above n = 8.
Coupling brute_force_plan(const EmpiricalMeasure& source, const EmpiricalMeasure& target);

/// sum_ij plan_ij * cost_ij.
double transport_cost(const Coupling& coupling, const Eigen::MatrixXd& cost);

/// sqrt(transport_cost); the W2 value when the plan is optimal.
double w2(const Coupling& coupling, const Eigen::MatrixXd& cost);

/// Conditional mean of the plan: row i maps to
/// (sum_j plan_ij y_j) / (sum_j plan_ij). Throws DegenerateRowError when a
/// row carries no mass.
Eigen::MatrixXd barycentric_projection(const Coupling& coupling, const EmpiricalMeasure& target);

/// Displacement field projection - identity at the source atoms.
TangentField tangent_field(const Eigen::MatrixXd& projection, const EmpiricalMeasure& source);

}  // namespace idd
