#pragma once

#include <cstdint>
#include <vector>

#include "idd/empirical_measure.hpp"
#include "idd/solver.hpp"

namespace idd {

struct BarycenterConfig {
    int m_atoms = 128;        // atom budget of the fitted barycenter
    double tol = 1e-5;        // relative functional-decrease stop rule
    int max_iter = 50;
    std::uint64_t init_seed = 0;
};

struct BarycenterResult {
    EmpiricalMeasure barycenter;
    double functional = 0.0;            // best value reached
    int iterations = 0;
    std::vector<double> history;        // best-so-far functional per iteration
};

/// Mean squared transport cost from the candidate to every measure,
/// (1/M) sum_t cost(candidate, mu_t) under the configured solver.
/// Summation is order-independent, so permuting `measures` changes nothing.
double frechet_functional(const EmpiricalMeasure& candidate,
                          const std::vector<EmpiricalMeasure>& measures,
                          const SolverConfig& solver);

/// Free-support barycenter by fixed-point iteration: atoms start as a seeded
/// uniform subsample of the pooled input points; each sweep re-solves the
/// plans and moves every atom to the average of its barycentric projections.
/// Stops on relative functional decrease below tol or at max_iter; the best
/// iterate is kept, so the reported history is non-increasing.
BarycenterResult fit_barycenter(const std::vector<EmpiricalMeasure>& measures,
                                const BarycenterConfig& config, const SolverConfig& solver);

}  // namespace idd
