#include "idd/solver.hpp"

#include <string>

namespace idd {

Coupling solve_plan(const EmpiricalMeasure& source, const EmpiricalMeasure& target,
                    const SolverConfig& config, SinkhornWarmStart* warm) {
    PlanMethod method = config.method;
    if (method == PlanMethod::auto_select)
        method = (source.dim() == 1) ? PlanMethod::exact_1d : PlanMethod::sinkhorn;
    if (method == PlanMethod::exact_1d) return exact_plan_1d(source, target);

    const Eigen::MatrixXd c = cost_matrix(source, target);
    const double eps = default_epsilon(c, config.eps_scale);
    SinkhornParams params;
    params.tol = config.marginal_tol;
    params.max_iter = config.max_iter;
    params.round_cap = config.round_cap;
    return sinkhorn_plan(source, target, eps, params, warm);
}

double plan_cost(const EmpiricalMeasure& source, const EmpiricalMeasure& target,
                 const SolverConfig& config) {
    Coupling pi = solve_plan(source, target, config);
    return transport_cost(pi, cost_matrix(source, target));
}

const char* to_string(PlanMethod method) {
    switch (method) {
        case PlanMethod::sinkhorn: return "sinkhorn";
        case PlanMethod::exact_1d: return "exact_1d";
        case PlanMethod::auto_select: return "auto";
    }
    return "sinkhorn";
}

PlanMethod plan_method_from_string(const std::string& name) {
    if (name == "sinkhorn") return PlanMethod::sinkhorn;
    if (name == "exact_1d") return PlanMethod::exact_1d;
    if (name == "auto") return PlanMethod::auto_select;
    throw ConfigError("unknown plan method '" + name + "' (sinkhorn | exact_1d | auto)");
}

}  // namespace idd
