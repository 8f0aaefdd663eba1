#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <random>
#include <vector>

#include "idd/barycenter.hpp"
#include "idd/ot.hpp"

using idd::EmpiricalMeasure;

namespace {

EmpiricalMeasure gaussian_cloud(int n, int d, double mean, double sd, std::mt19937_64& gen) {
    std::normal_distribution<double> dist(mean, sd);
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = dist(gen);
    return EmpiricalMeasure::uniform(std::move(m));
}

idd::SolverConfig exact1d() {
    idd::SolverConfig cfg;
    cfg.method = idd::PlanMethod::exact_1d;
    return cfg;
}

// Interpolated quantile of a 1-D empirical measure: atoms sit at the
// cumulative-weight midpoints, linear in between. Avoids the step-function
// jump artifacts of the raw order-statistic quantile when comparing grids of
// different resolution.
double quantile(const EmpiricalMeasure& mu, double q) {
    std::vector<std::pair<double, double>> atoms;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        atoms.emplace_back(mu.support()(i, 0), mu.weights()[i]);
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> pos, val;
    double cum = 0.0;
    for (const auto& [x, w] : atoms) {
        pos.push_back(cum + 0.5 * w);
        val.push_back(x);
        cum += w;
    }
    if (q <= pos.front()) return val.front();
    if (q >= pos.back()) return val.back();
    auto hi = std::upper_bound(pos.begin(), pos.end(), q);
    std::size_t j = static_cast<std::size_t>(hi - pos.begin());
    double f = (q - pos[j - 1]) / (pos[j] - pos[j - 1]);
    return val[j - 1] + f * (val[j] - val[j - 1]);
}

}  // namespace

TEST_SUITE("barycenter") {

TEST_CASE("frechet_functional of a measure against itself is zero") {
    std::mt19937_64 gen(201);
    auto mu = gaussian_cloud(12, 1, 0.0, 1.0, gen);
    CHECK(idd::frechet_functional(mu, {mu}, exact1d()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frechet_functional of symmetric translates equals the shift energy") {
    std::mt19937_64 gen(203);
    auto x = gaussian_cloud(15, 1, 0.0, 1.0, gen);
    const double delta = 0.8;
    EmpiricalMeasure plus = EmpiricalMeasure::uniform(x.support().array() + delta);
    EmpiricalMeasure minus = EmpiricalMeasure::uniform(x.support().array() - delta);
    double value = idd::frechet_functional(x, {plus, minus}, exact1d());
    CHECK(value == doctest::Approx(delta * delta).epsilon(1e-10));
}

TEST_CASE("frechet_functional matches direct 1-D oracle and is order-invariant") {
    std::mt19937_64 gen(207);
    std::vector<EmpiricalMeasure> measures;
    for (int t = 0; t < 5; ++t) measures.push_back(gaussian_cloud(10 + t, 1, 0.1 * t, 1.0, gen));
    auto candidate = gaussian_cloud(8, 1, 0.0, 1.0, gen);

    double direct = 0.0;
    for (const auto& mu : measures) {
        auto pi = idd::exact_plan_1d(candidate, mu);
        direct += idd::transport_cost(pi, idd::cost_matrix(candidate, mu));
    }
    direct /= static_cast<double>(measures.size());

    double value = idd::frechet_functional(candidate, measures, exact1d());
    CHECK(value == doctest::Approx(direct).epsilon(1e-12));

    std::vector<EmpiricalMeasure> shuffled{measures[3], measures[0], measures[4], measures[1],
                                           measures[2]};
    CHECK(idd::frechet_functional(candidate, shuffled, exact1d()) == value);
}

TEST_CASE("frechet_functional rejects empty input") {
    std::mt19937_64 gen(209);
    auto mu = gaussian_cloud(5, 1, 0.0, 1.0, gen);
    CHECK_THROWS_AS(idd::frechet_functional(mu, {}, exact1d()), idd::EmptyInputError);
}

TEST_CASE("fit_barycenter reproduces a single measure") {
    std::mt19937_64 gen(211);
    auto mu = gaussian_cloud(20, 1, 0.5, 1.0, gen);
    idd::BarycenterConfig cfg;
    cfg.m_atoms = 32;  // >= n, so the subsample contains every atom
    cfg.init_seed = 5;
    auto res = idd::fit_barycenter({mu}, cfg, exact1d());
    auto pi = idd::exact_plan_1d(res.barycenter, mu);
    CHECK(idd::w2(pi, idd::cost_matrix(res.barycenter, mu)) < 1e-8);
}

TEST_CASE("fit_barycenter config validation") {
    std::mt19937_64 gen(213);
    auto mu = gaussian_cloud(6, 1, 0.0, 1.0, gen);
    idd::BarycenterConfig bad;
    bad.m_atoms = 1;
    CHECK_THROWS_AS(idd::fit_barycenter({mu}, bad, exact1d()), idd::ConfigError);
    CHECK_THROWS_AS(idd::fit_barycenter({}, idd::BarycenterConfig{}, exact1d()),
                    idd::EmptyInputError);
}

TEST_CASE("two-measure 1-D barycenter averages the quantile functions") {
    std::mt19937_64 gen(217);
    auto a = gaussian_cloud(150, 1, 0.0, 1.0, gen);
    auto b = gaussian_cloud(150, 1, 3.0, 0.5, gen);

    idd::BarycenterConfig cfg;
    cfg.m_atoms = 256;
    cfg.init_seed = 11;
    auto res = idd::fit_barycenter({a, b}, cfg, exact1d());

    double sup_err = 0.0;
    for (int k = 1; k <= 99; ++k) {
        double q = k / 100.0;
        double oracle = 0.5 * (quantile(a, q) + quantile(b, q));
        sup_err = std::max(sup_err, std::abs(quantile(res.barycenter, q) - oracle));
    }
    CHECK(sup_err <= 0.05);
}

TEST_CASE("barycenter of symmetric translates recovers the center") {
    std::mt19937_64 gen(219);
    auto x = gaussian_cloud(64, 2, 0.0, 0.7, gen);
    Eigen::RowVector2d delta(1.0, -0.5);
    EmpiricalMeasure plus = EmpiricalMeasure::uniform(x.support().rowwise() + delta);
    EmpiricalMeasure minus = EmpiricalMeasure::uniform(x.support().rowwise() - delta);

    idd::BarycenterConfig cfg;
    cfg.m_atoms = 64;
    cfg.init_seed = 3;
    idd::SolverConfig solver;  // sinkhorn default
    auto res = idd::fit_barycenter({plus, minus}, cfg, solver);

    double dist = std::sqrt(idd::plan_cost(res.barycenter, x, solver));
    CHECK(dist <= 0.05 * delta.norm());
}

TEST_CASE("functional history is non-increasing") {
    std::mt19937_64 gen(223);
    std::vector<EmpiricalMeasure> measures;
    for (int t = 0; t < 6; ++t) measures.push_back(gaussian_cloud(25, 2, 0.0, 1.0, gen));
    idd::BarycenterConfig cfg;
    cfg.m_atoms = 24;
    auto res = idd::fit_barycenter(measures, cfg, idd::SolverConfig{});
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i] <= res.history[i - 1] + 1e-15);
}

TEST_CASE("permutation of input measures yields the identical barycenter") {
    std::mt19937_64 gen(227);
    std::vector<EmpiricalMeasure> measures;
    for (int t = 0; t < 5; ++t) measures.push_back(gaussian_cloud(15, 2, 0.1 * t, 1.0, gen));
    std::vector<EmpiricalMeasure> shuffled{measures[4], measures[2], measures[0], measures[1],
                                           measures[3]};

    idd::BarycenterConfig cfg;
    cfg.m_atoms = 16;
    cfg.init_seed = 42;
    cfg.max_iter = 8;
    auto r1 = idd::fit_barycenter(measures, cfg, idd::SolverConfig{});
    auto r2 = idd::fit_barycenter(shuffled, cfg, idd::SolverConfig{});
    REQUIRE(r1.barycenter.size() == r2.barycenter.size());
    CHECK((r1.barycenter.support() - r2.barycenter.support()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fitted barycenter is a valid uniform measure") {
    std::mt19937_64 gen(229);
    std::vector<EmpiricalMeasure> measures;
    for (int t = 0; t < 4; ++t) measures.push_back(gaussian_cloud(20, 2, 0.0, 1.0, gen));
    idd::BarycenterConfig cfg;
    cfg.m_atoms = 16;
    auto res = idd::fit_barycenter(measures, cfg, idd::SolverConfig{});
    CHECK(res.barycenter.support().allFinite());
    CHECK(res.barycenter.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (Eigen::Index i = 0; i < res.barycenter.size(); ++i)
        CHECK(res.barycenter.weights()[i] ==
              doctest::Approx(1.0 / res.barycenter.size()).epsilon(1e-12));
}

}  // TEST_SUITE barycenter
