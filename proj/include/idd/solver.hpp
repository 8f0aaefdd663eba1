#pragma once

#include "idd/coupling.hpp"
#include "idd/empirical_measure.hpp"
#include "idd/ot.hpp"

namespace idd {

enum class PlanMethod {
    sinkhorn,     // entropic, any dimension (default)
    exact_1d,     // monotone coupling, d == 1 only
    auto_select,  // exact for d == 1, sinkhorn otherwise
};

/// Solver settings shared by barycenter fitting and monitoring.
struct SolverConfig {
    PlanMethod method = PlanMethod::sinkhorn;
    double eps_scale = 5e-3;  // eps = eps_scale x median nonzero cost
    double marginal_tol = kMarginalTol;
    int max_iter = 10000;
    double round_cap = 1e-4;  // see SinkhornParams::round_cap
};

/// Solve a plan between two measures with the configured method. The
/// optional warm start is consulted and refreshed on the Sinkhorn path.
Coupling solve_plan(const EmpiricalMeasure& source, const EmpiricalMeasure& target,
                    const SolverConfig& config, SinkhornWarmStart* warm = nullptr);

/// Transport cost of the configured plan (squared W2 up to entropic blur).
double plan_cost(const EmpiricalMeasure& source, const EmpiricalMeasure& target,
                 const SolverConfig& config);

const char* to_string(PlanMethod method);
PlanMethod plan_method_from_string(const std::string& name);

}  // namespace idd
