#include "idd/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "idd/ot.hpp"
#include "idd/parallel.hpp"
#include "idd/rng.hpp"

namespace idd {

namespace {

void check_inputs(const std::vector<EmpiricalMeasure>& measures) {
    if (measures.empty()) throw EmptyInputError("barycenter: no input measures");
    for (const auto& mu : measures)
        if (mu.dim() != measures.front().dim())
            throw DimensionError("barycenter: measures have mixed dimensions");
}

// Sum in value order so the result does not depend on the order of the
// input measures (exact permutation invariance, not just up to rounding).
double ordered_mean(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

double frechet_functional(const EmpiricalMeasure& candidate,
                          const std::vector<EmpiricalMeasure>& measures,
                          const SolverConfig& solver) {
    check_inputs(measures);
    std::vector<double> costs(measures.size());
    detail::parallel_for(static_cast<long>(measures.size()), [&](long i) {
        costs[static_cast<std::size_t>(i)] =
            plan_cost(candidate, measures[static_cast<std::size_t>(i)], solver);
    });
    return ordered_mean(std::move(costs));
}

BarycenterResult fit_barycenter(const std::vector<EmpiricalMeasure>& measures,
                                const BarycenterConfig& config, const SolverConfig& solver) {
    check_inputs(measures);
    if (config.m_atoms < 2) throw ConfigError("barycenter: m_atoms must be >= 2");
    if (!(config.tol > 0.0)) throw ConfigError("barycenter: tol must be > 0");
    if (config.max_iter < 1) throw ConfigError("barycenter: max_iter must be >= 1");

    const Eigen::Index d = measures.front().dim();
    const std::size_t n_measures = measures.size();

    // Seeded uniform subsample of the pooled calibration points. The pool is
    // put in canonical (lexicographic) order first so the draw depends only
    // on the multiset of points, not on the order of the input measures.
    Eigen::Index pooled = 0;
    for (const auto& mu : measures) pooled += mu.size();
    const Eigen::Index m = std::min<Eigen::Index>(config.m_atoms, pooled);

    Eigen::MatrixXd pool(pooled, d);
    Eigen::Index at = 0;
    for (const auto& mu : measures) {
        pool.middleRows(at, mu.size()) = mu.support();
        at += mu.size();
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pooled));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (pool(a, j) != pool(b, j)) return pool(a, j) < pool(b, j);
        }
        return false;
    });
    auto gen = rng::engine(rng::derive(config.init_seed, {0x6261727963ULL}));
    std::shuffle(order.begin(), order.end(), gen);

    Eigen::MatrixXd atoms(m, d);
    for (Eigen::Index k = 0; k < m; ++k) atoms.row(k) = pool.row(order[static_cast<std::size_t>(k)]);

    EmpiricalMeasure candidate = EmpiricalMeasure::uniform(std::move(atoms));
    EmpiricalMeasure best = candidate;
    double best_value = std::numeric_limits<double>::infinity();
    double prev_value = std::numeric_limits<double>::infinity();

    BarycenterResult result{best, 0.0, 0, {}};
    // The support pair of each (candidate, measure) solve persists across
    // fixed-point iterations, so the dual potentials carry over.
    std::vector<SinkhornWarmStart> warm(n_measures);
    for (int it = 1; it <= config.max_iter; ++it) {
        // Per-measure solves are independent; results land in per-index slots.
        std::vector<double> costs(n_measures);
        std::vector<Eigen::MatrixXd> projections(n_measures);
        detail::parallel_for(static_cast<long>(n_measures), [&](long idx) {
            const auto& mu = measures[static_cast<std::size_t>(idx)];
            Coupling pi = solve_plan(candidate, mu, solver, &warm[static_cast<std::size_t>(idx)]);
            costs[static_cast<std::size_t>(idx)] = transport_cost(pi, cost_matrix(candidate, mu));
            projections[static_cast<std::size_t>(idx)] = barycentric_projection(pi, mu);
        });

        // Per-atom accumulation is sorted before summing, again for exact
        // permutation invariance of the update.
        std::vector<std::vector<Eigen::RowVectorXd>> proj(static_cast<std::size_t>(candidate.size()));
        for (auto& p : proj) p.reserve(n_measures);
        for (const auto& t : projections)
            for (Eigen::Index i = 0; i < t.rows(); ++i)
                proj[static_cast<std::size_t>(i)].push_back(t.row(i));

        const double value = ordered_mean(std::move(costs));
        result.iterations = it;
        if (value < best_value) {
            best_value = value;
            best = candidate;
        }
        result.history.push_back(best_value);

        const double decrease = prev_value - value;
        if (it > 1 && decrease < config.tol * std::max(prev_value, 1e-15)) break;
        prev_value = value;
        if (it == config.max_iter) break;

        Eigen::MatrixXd updated(candidate.size(), d);
        for (Eigen::Index i = 0; i < candidate.size(); ++i) {
            auto& rows = proj[static_cast<std::size_t>(i)];
            std::sort(rows.begin(), rows.end(),
                      [](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
                          return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                              b.data(), b.data() + b.size());
                      });
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
            for (const auto& r : rows) sum += r;
            updated.row(i) = sum / static_cast<double>(n_measures);
        }
        candidate = EmpiricalMeasure(std::move(updated), candidate.weights());
    }

    result.barycenter = std::move(best);
    result.functional = best_value;
    return result;
}

}  // namespace idd
