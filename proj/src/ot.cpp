#include "idd/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace idd {

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& source, const EmpiricalMeasure& target) {
    if (source.dim() != target.dim())
        throw DimensionError("cost_matrix: source dim " + std::to_string(source.dim()) +
                             " != target dim " + std::to_string(target.dim()));
    const Eigen::MatrixXd& x = source.support();
    const Eigen::MatrixXd& y = target.support();
    Eigen::VectorXd x2 = x.rowwise().squaredNorm();
    Eigen::VectorXd y2 = y.rowwise().squaredNorm();
    Eigen::MatrixXd c = -2.0 * x * y.transpose();
    c.colwise() += x2;
    c.rowwise() += y2.transpose();
    // The expansion can go a hair negative for near-identical points.
    return c.cwiseMax(0.0);
}

double default_epsilon(const Eigen::MatrixXd& cost, double scale) {
    std::vector<double> nonzero;
    nonzero.reserve(static_cast<std::size_t>(cost.size()));
    for (Eigen::Index i = 0; i < cost.size(); ++i)
        if (cost(i) > 0.0) nonzero.push_back(cost(i));
    if (nonzero.empty()) return scale;
    auto mid = nonzero.begin() + static_cast<std::ptrdiff_t>(nonzero.size() / 2);
    std::nth_element(nonzero.begin(), mid, nonzero.end());
    return scale * *mid;
}

namespace {

Eigen::VectorXd logsumexp_rows(const Eigen::MatrixXd& a) {
    Eigen::VectorXd m = a.rowwise().maxCoeff();
    return m.array() + (a.colwise() - m).array().exp().rowwise().sum().log();
}

Eigen::VectorXd logsumexp_cols(const Eigen::MatrixXd& a) {
    Eigen::RowVectorXd m = a.colwise().maxCoeff();
    Eigen::RowVectorXd s = m.array() + (a.rowwise() - m).array().exp().colwise().sum().log();
    return s.transpose();
}

}  // namespace

namespace {

// Project an almost-feasible plan onto the transport polytope: scale rows and
// columns down to their targets, then spread the missing mass as a rank-one
// nonnegative correction. Leaves already-feasible plans untouched up to FP.
void round_to_marginals(Eigen::MatrixXd& plan, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd r = plan.rowwise().sum();
    for (Eigen::Index i = 0; i < r.size(); ++i)
        if (r[i] > a[i]) plan.row(i) *= a[i] / r[i];
    Eigen::VectorXd c = plan.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < c.size(); ++j)
        if (c[j] > b[j]) plan.col(j) *= b[j] / c[j];
    Eigen::VectorXd er = (a - plan.rowwise().sum()).cwiseMax(0.0);
    Eigen::VectorXd ec = (b - plan.colwise().sum().transpose()).cwiseMax(0.0);
    const double s = er.sum();
    if (s > 0.0) plan += er * ec.transpose() / s;
}

}  // namespace

Coupling sinkhorn_plan(const EmpiricalMeasure& source, const EmpiricalMeasure& target, double eps,
                       const SinkhornParams& params, SinkhornWarmStart* warm) {
    if (eps <= 0.0) throw ConfigError("sinkhorn_plan: eps must be > 0");
    const Eigen::MatrixXd c = cost_matrix(source, target);
    const Eigen::Index n = source.size();
    const Eigen::Index m = target.size();
    const Eigen::VectorXd loga = source.weights().array().log();
    const Eigen::VectorXd logb = target.weights().array().log();

    // Dual potentials, maintained in the log domain so small eps stays finite.
    const bool warm_valid = warm && warm->f.size() == n && warm->f.allFinite();
    Eigen::VectorXd f = warm_valid ? warm->f : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);

    auto plan_from_potentials = [&]() -> Eigen::MatrixXd {
        Eigen::MatrixXd logp = (-c).array() / eps;
        logp.colwise() += (f / eps + loga).eval();
        logp.rowwise() += (g / eps + logb).transpose().eval();
        return logp.array().exp();
    };

    // Epsilon scaling: small regularization converges impractically slowly
    // from a cold start, so anneal eps from the cost scale down to the target
    // and warm-start the potentials between levels. Valid warm potentials
    // replace the ladder outright.
    std::vector<double> levels{eps};
    if (!warm_valid) {
        const double coarse = default_epsilon(c, 0.5);
        for (double e = eps * 3.0; e < coarse; e *= 3.0) levels.push_back(e);
        std::reverse(levels.begin(), levels.end());
    } else {
        // Derive the target potential from the warm source potential so the
        // first f-update sees a consistent pair.
        Eigen::MatrixXd t = (-c).array() / eps;
        t.colwise() += (f / eps + loga).eval();
        g = -eps * logsumexp_cols(t);
    }
    constexpr int kIterPerLevel = 10;

    // Sinkhorn can stall in a sublinear regime where the violation shrinks
    // like 1/t; the final rounding step absorbs anything below the round cap,
    // so there is no point iterating once progress per check drops below 10%.
    const double round_cap = params.round_cap;

    int budget = params.max_iter;
    double violation = std::numeric_limits<double>::infinity();
    for (std::size_t level = 0; level < levels.size() && budget > 0; ++level) {
        const double e = levels[level];
        const bool last = (level + 1 == levels.size());
        const Eigen::MatrixXd nce = (-c).array() / e;
        const int iters = last ? budget : std::min(budget, kIterPerLevel);

        // Overrelaxation at the target level roughly squares the linear
        // convergence rate. It is only stable from a warm start, so the
        // safeguard below falls back to plain updates if the violation grows.
        double theta = last ? 1.8 : 1.0;
        double prev_violation = std::numeric_limits<double>::infinity();
        Eigen::VectorXd f_safe = f, g_safe = g;
        for (int it = 1; it <= iters; ++it, --budget) {
            // f_i = -e * LSE_j[(g_j - C_ij)/e + log b_j]
            Eigen::MatrixXd t = nce;
            t.rowwise() += (g / e + logb).transpose().eval();
            f = (1.0 - theta) * f + theta * (-e * logsumexp_rows(t));
            // g_j = -e * LSE_i[(f_i - C_ij)/e + log a_i]
            t = nce;
            t.colwise() += (f / e + loga).eval();
            g = (1.0 - theta) * g + theta * (-e * logsumexp_cols(t));

            if (last && (it % params.check_every == 0 || it == iters)) {
                // Column marginals are exact right after a plain g-update;
                // the row deviation is the convergence measure.
                violation =
                    (plan_from_potentials().rowwise().sum() - source.weights()).cwiseAbs().maxCoeff();
                if (theta > 1.0 && violation > 1.5 * prev_violation) {
                    f = f_safe;
                    g = g_safe;
                    theta = 1.0;
                    continue;
                }
                const bool stalled = violation > 0.9 * prev_violation && violation <= round_cap;
                prev_violation = violation;
                f_safe = f;
                g_safe = g;
                if (violation <= params.tol || stalled) {
                    budget -= 1;
                    break;
                }
            }
        }
    }

    Eigen::MatrixXd plan = plan_from_potentials();
    violation = (plan.rowwise().sum() - source.weights()).cwiseAbs().maxCoeff();
    if (violation > round_cap) {
        // A stale warm start can mislead the iteration; retry cold once.
        if (warm_valid) {
            warm->f.resize(0);
            return sinkhorn_plan(source, target, eps, params, nullptr);
        }
        throw ConvergenceError("sinkhorn_plan: marginal violation " + std::to_string(violation) +
                                   " > tol after " + std::to_string(params.max_iter) + " iterations",
                               violation);
    }
    round_to_marginals(plan, source.weights(), target.weights());
    if (warm) warm->f = f;

    return Coupling{std::move(plan), source.weights(), target.weights(), eps};
}

Coupling exact_plan_1d(const EmpiricalMeasure& source, const EmpiricalMeasure& target) {
    if (source.dim() != 1 || target.dim() != 1)
        throw DimensionError("exact_plan_1d: requires 1-D measures");
    const Eigen::Index n = source.size();
    const Eigen::Index m = target.size();

    std::vector<Eigen::Index> si(static_cast<std::size_t>(n)), tj(static_cast<std::size_t>(m));
    std::iota(si.begin(), si.end(), 0);
    std::iota(tj.begin(), tj.end(), 0);
    std::stable_sort(si.begin(), si.end(), [&](Eigen::Index a, Eigen::Index b) {
        return source.support()(a, 0) < source.support()(b, 0);
    });
    std::stable_sort(tj.begin(), tj.end(), [&](Eigen::Index a, Eigen::Index b) {
        return target.support()(a, 0) < target.support()(b, 0);
    });

    // North-west-corner walk over the sorted supports.
    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(n, m);
    std::size_t i = 0, j = 0;
    double ra = source.weights()[si[0]];
    double rb = target.weights()[tj[0]];
    while (i < si.size() && j < tj.size()) {
        const double t = std::min(ra, rb);
        plan(si[i], tj[j]) += t;
        ra -= t;
        rb -= t;
        if (ra <= rb) {
            ++i;
            if (i < si.size()) ra = source.weights()[si[i]];
        } else {
            ++j;
            if (j < tj.size()) rb = target.weights()[tj[j]];
        }
    }

    return Coupling{std::move(plan), source.weights(), target.weights(), 0.0};
}

Coupling brute_force_plan(const EmpiricalMeasure& source, const EmpiricalMeasure& target) {
    if (source.dim() != target.dim())
        throw DimensionError("brute_force_plan: dimension mismatch");
    const Eigen::Index n = source.size();
    if (n != target.size())
        throw ConfigError("brute_force_plan: requires equal atom counts");
    if (n > 8)
        throw OracleSizeError("brute_force_plan: n = " + std::to_string(n) + " exceeds 8");
    const double u = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(source.weights()[i] - u) > 1e-12 || std::abs(target.weights()[i] - u) > 1e-12)
            throw ConfigError("brute_force_plan: requires equal-weight measures");

    const Eigen::MatrixXd c = cost_matrix(source, target);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Eigen::Index> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    // Lexicographic enumeration; keeping only strict improvements selects the
    // lexicographically smallest optimal permutation.
    do {
        double cost = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) cost += c(i, perm[static_cast<std::size_t>(i)]);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) plan(i, best[static_cast<std::size_t>(i)]) = u;
    return Coupling{std::move(plan), source.weights(), target.weights(), 0.0};
}

double transport_cost(const Coupling& coupling, const Eigen::MatrixXd& cost) {
    if (coupling.plan.rows() != cost.rows() || coupling.plan.cols() != cost.cols())
        throw DimensionError("transport_cost: plan and cost shapes differ");
    return (coupling.plan.array() * cost.array()).sum();
}

double w2(const Coupling& coupling, const Eigen::MatrixXd& cost) {
    return std::sqrt(std::max(0.0, transport_cost(coupling, cost)));
}

Eigen::MatrixXd barycentric_projection(const Coupling& coupling, const EmpiricalMeasure& target) {
    if (coupling.plan.cols() != target.size())
        throw DimensionError("barycentric_projection: plan columns != target atoms");
    Eigen::VectorXd row_mass = coupling.plan.rowwise().sum();
    for (Eigen::Index i = 0; i < row_mass.size(); ++i)
        if (row_mass[i] <= 0.0)
            throw DegenerateRowError("barycentric_projection: row " + std::to_string(i) +
                                     " carries no mass");
    Eigen::MatrixXd proj = coupling.plan * target.support();
    proj.array().colwise() /= row_mass.array();
    return proj;
}

TangentField tangent_field(const Eigen::MatrixXd& projection, const EmpiricalMeasure& source) {
    if (projection.rows() != source.size() || projection.cols() != source.dim())
        throw DimensionError("tangent_field: projection shape does not match source");
    return TangentField{projection - source.support(), source.weights()};
}

}  // namespace idd
