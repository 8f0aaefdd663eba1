#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "idd/mfpca.hpp"

using idd::EigenBasis;
using idd::TangentField;

namespace {

Eigen::VectorXd random_weights(Eigen::Index m, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = unif(gen);
    w /= w.sum();
    return w;
}

TangentField random_field(Eigen::Index m, Eigen::Index d, const Eigen::VectorXd& w,
                          std::mt19937_64& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd v(m, d);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(gen);
    return {v, w};
}

std::vector<TangentField> random_fields(int n, Eigen::Index m, Eigen::Index d,
                                        const Eigen::VectorXd& w, std::mt19937_64& gen) {
    std::vector<TangentField> fields;
    for (int t = 0; t < n; ++t) fields.push_back(random_field(m, d, w, gen));
    return fields;
}

}  // namespace

TEST_SUITE("mfpca") {

TEST_CASE("weighted_inner basics") {
    std::mt19937_64 gen(101);
    Eigen::VectorXd w = random_weights(5, gen);
    TangentField zero{Eigen::MatrixXd::Zero(5, 2), w};
    CHECK(idd::weighted_inner(zero, zero) == 0.0);

    // Constant fields with uniform weights reduce to the plain dot product.
    Eigen::VectorXd uw = Eigen::VectorXd::Constant(4, 0.25);
    Eigen::RowVector2d d1(1.5, -2.0), d2(0.5, 3.0);
    TangentField f{d1.replicate(4, 1), uw}, g{d2.replicate(4, 1), uw};
    CHECK(idd::weighted_inner(f, g) == doctest::Approx(d1.dot(d2)).epsilon(1e-14));
}

TEST_CASE("weighted_inner matches direct summation") {
    std::mt19937_64 gen(103);
    Eigen::VectorXd w = random_weights(7, gen);
    auto f = random_field(7, 3, w, gen);
    auto g = random_field(7, 3, w, gen);
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 7; ++i) direct += w[i] * f.vectors.row(i).dot(g.vectors.row(i));
    CHECK(idd::weighted_inner(f, g) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("weighted_inner rejects mismatched grids") {
    std::mt19937_64 gen(107);
    Eigen::VectorXd w5 = random_weights(5, gen);
    Eigen::VectorXd w6 = random_weights(6, gen);
    auto f = random_field(5, 2, w5, gen);
    auto g = random_field(6, 2, w6, gen);
    CHECK_THROWS_AS(idd::weighted_inner(f, g), idd::DimensionError);

    auto h = random_field(5, 2, random_weights(5, gen), gen);
    CHECK_THROWS_AS(idd::weighted_inner(f, h), idd::DimensionError);
}

TEST_CASE("fit_basis rejects degenerate inputs") {
    std::mt19937_64 gen(109);
    Eigen::VectorXd w = random_weights(4, gen);
    auto f = random_field(4, 2, w, gen);

    CHECK_THROWS_AS(idd::fit_basis({f, f}), idd::InsufficientSamplesError);
    CHECK_THROWS_AS(idd::fit_basis({f, f, f, f}), idd::DegenerateVarianceError);
}

TEST_CASE("single-direction fields give one eigenpair with the known variance") {
    std::mt19937_64 gen(113);
    const int n0 = 10;
    Eigen::VectorXd w = random_weights(6, gen);
    auto base = random_field(6, 2, w, gen);
    auto u = random_field(6, 2, w, gen);

    std::vector<TangentField> fields;
    for (int t = 0; t < n0; ++t) {
        double sign = (t % 2 == 0) ? 1.0 : -1.0;
        fields.push_back({base.vectors + sign * u.vectors, w});
    }
    EigenBasis basis = idd::fit_basis(fields);
    REQUIRE(basis.rank() == 1);
    const double u2 = idd::weighted_norm2(u);
    CHECK(basis.eigenvalues[0] == doctest::Approx(u2 * n0 / (n0 - 1.0)).epsilon(1e-10));
    CHECK((basis.mean_field.vectors - base.vectors).cwiseAbs().maxCoeff() < 1e-12);
    // phi_1 is u up to sign and weighted normalization
    double corr = idd::weighted_inner(basis.eigenfields[0], u) / std::sqrt(u2);
    CHECK(std::abs(std::abs(corr) - 1.0) < 1e-10);
}

TEST_CASE("gram eigenvalues equal dense weighted-covariance eigenvalues") {
    std::mt19937_64 gen(127);
    for (int rep = 0; rep < 5; ++rep) {
        const int n0 = 20;
        const Eigen::Index m = 5, d = 2;  // m*d = 10
        Eigen::VectorXd w = random_weights(m, gen);
        auto fields = random_fields(n0, m, d, w, gen);
        EigenBasis basis = idd::fit_basis(fields);

        // Dense route: covariance of sqrt(w)-scaled flattened fields.
        Eigen::MatrixXd z(n0, m * d);
        for (int t = 0; t < n0; ++t) {
            Eigen::MatrixXd s = fields[static_cast<std::size_t>(t)].vectors;
            s.array().colwise() *= w.array().sqrt();
            z.row(t) = Eigen::Map<const Eigen::RowVectorXd>(s.data(), m * d);
        }
        Eigen::RowVectorXd mean = z.colwise().mean();
        z.rowwise() -= mean;
        Eigen::MatrixXd cov = z.transpose() * z / (n0 - 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

        REQUIRE(basis.rank() <= eig.eigenvalues().size());
        for (Eigen::Index k = 0; k < basis.rank(); ++k) {
            double dense = eig.eigenvalues()[eig.eigenvalues().size() - 1 - k];
            CHECK(basis.eigenvalues[k] == doctest::Approx(dense).epsilon(1e-8));
        }
    }
}

TEST_CASE("eigenfields are orthonormal in weighted L2") {
    std::mt19937_64 gen(131);
    Eigen::VectorXd w = random_weights(8, gen);
    auto fields = random_fields(12, 8, 3, w, gen);
    EigenBasis basis = idd::fit_basis(fields);
    for (Eigen::Index a = 0; a < basis.rank(); ++a)
        for (Eigen::Index b = a; b < basis.rank(); ++b) {
            double ip = idd::weighted_inner(basis.eigenfields[static_cast<std::size_t>(a)],
                                            basis.eigenfields[static_cast<std::size_t>(b)]);
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("project_scores on mean and on eigen-directions") {
    std::mt19937_64 gen(137);
    Eigen::VectorXd w = random_weights(6, gen);
    auto fields = random_fields(9, 6, 2, w, gen);
    EigenBasis basis = idd::fit_basis(fields);

    Eigen::VectorXd at_mean = idd::project_scores(basis, basis.mean_field);
    CHECK(at_mean.cwiseAbs().maxCoeff() < 1e-10);

    const double c = 2.75;
    TangentField shifted{basis.mean_field.vectors + c * basis.eigenfields[0].vectors, w};
    Eigen::VectorXd scores = idd::project_scores(basis, shifted);
    CHECK(scores[0] == doctest::Approx(c).epsilon(1e-10));
    for (Eigen::Index k = 1; k < scores.size(); ++k) CHECK(std::abs(scores[k]) < 1e-8);
}

TEST_CASE("parseval: score energy never exceeds field energy") {
    std::mt19937_64 gen(139);
    Eigen::VectorXd w = random_weights(6, gen);
    auto fields = random_fields(8, 6, 2, w, gen);
    EigenBasis basis = idd::fit_basis(fields);
    for (int rep = 0; rep < 10; ++rep) {
        auto f = random_field(6, 2, w, gen);
        Eigen::VectorXd scores = idd::project_scores(basis, f);
        TangentField delta{f.vectors - basis.mean_field.vectors, w};
        CHECK(scores.squaredNorm() <= idd::weighted_norm2(delta) + 1e-8);
    }
}

TEST_CASE("t2_statistic hand example") {
    EigenBasis basis;
    basis.truncation = 2;
    basis.eigenvalues.resize(2);
    basis.eigenvalues << 4.0, 9.0;
    Eigen::VectorXd scores(2);
    scores << 2.0, 3.0;
    CHECK(idd::t2_statistic(basis, scores) == doctest::Approx(2.0));
    CHECK(idd::t2_statistic(basis, Eigen::VectorXd::Zero(2)) == 0.0);
}

TEST_CASE("spe is zero in-span and picks up off-span energy") {
    std::mt19937_64 gen(149);
    Eigen::VectorXd w = random_weights(7, gen);
    auto fields = random_fields(10, 7, 2, w, gen);
    idd::MfpcaConfig cfg;
    cfg.k_override = 2;
    EigenBasis basis = idd::fit_basis(fields, cfg);
    REQUIRE(basis.rank() > 3);

    const double c = 1.7;
    TangentField in_span{basis.mean_field.vectors + c * basis.eigenfields[0].vectors, w};
    CHECK(idd::spe_statistic(basis, in_span) < 1e-8);

    std::size_t last = static_cast<std::size_t>(basis.rank() - 1);
    TangentField off_span{basis.mean_field.vectors + c * basis.eigenfields[last].vectors, w};
    CHECK(idd::spe_statistic(basis, off_span) == doctest::Approx(c * c).epsilon(1e-8));
}

TEST_CASE("spe equals the explicit projector residual") {
    std::mt19937_64 gen(151);
    Eigen::VectorXd w = random_weights(6, gen);
    auto fields = random_fields(9, 6, 2, w, gen);
    idd::MfpcaConfig cfg;
    cfg.k_override = 3;
    EigenBasis basis = idd::fit_basis(fields, cfg);

    auto f = random_field(6, 2, w, gen);
    TangentField delta{f.vectors - basis.mean_field.vectors, w};
    Eigen::MatrixXd residual = delta.vectors;
    for (int k = 0; k < basis.truncation; ++k) {
        const auto& phi = basis.eigenfields[static_cast<std::size_t>(k)];
        residual -= idd::weighted_inner(delta, phi) * phi.vectors;
    }
    double explicit_spe = idd::weighted_norm2({residual, w});
    CHECK(idd::spe_statistic(basis, f) == doctest::Approx(explicit_spe).epsilon(1e-10));
}

TEST_CASE("energy split closes for in-span fields") {
    std::mt19937_64 gen(157);
    Eigen::VectorXd w = random_weights(5, gen);
    auto fields = random_fields(8, 5, 2, w, gen);
    idd::MfpcaConfig cfg;
    cfg.k_override = 2;
    EigenBasis basis = idd::fit_basis(fields, cfg);

    // Field assembled inside the fitted span: |Delta|^2 = sum_r scores^2,
    // hence |Delta|^2 = retained score energy + SPE exactly.
    Eigen::MatrixXd mix = basis.mean_field.vectors;
    std::normal_distribution<double> coef(0.0, 1.0);
    for (Eigen::Index k = 0; k < basis.rank(); ++k)
        mix += coef(gen) * basis.eigenfields[static_cast<std::size_t>(k)].vectors;
    TangentField f{mix, w};

    auto stats = idd::chart_statistics(basis, f);
    TangentField delta{f.vectors - basis.mean_field.vectors, w};
    CHECK(idd::weighted_norm2(delta) ==
          doctest::Approx(stats.scores.squaredNorm() + stats.spe).epsilon(1e-8));
}

TEST_CASE("tail_energy and select_k") {
    std::mt19937_64 gen(163);
    Eigen::VectorXd w = random_weights(6, gen);
    auto fields = random_fields(10, 6, 2, w, gen);
    EigenBasis basis = idd::fit_basis(fields);

    CHECK(idd::tail_energy(basis, static_cast<int>(basis.rank())) == 0.0);
    CHECK(idd::select_k(basis, 1.0) == static_cast<int>(basis.rank()));
    CHECK_THROWS_AS(idd::select_k(basis, 0.0), idd::ConfigError);
    CHECK_THROWS_AS(idd::select_k(basis, 1.5), idd::ConfigError);

    double prev = idd::tail_energy(basis, 0);
    CHECK(prev == doctest::Approx(basis.total_variance).epsilon(1e-12));
    for (int k = 1; k <= basis.rank(); ++k) {
        double cur = idd::tail_energy(basis, k);
        CHECK(cur < prev);  // strictly decreasing until rank exhaustion
        prev = cur;
    }

    int k90 = idd::select_k(basis, 0.9);
    double cum = 0.0;
    for (int i = 0; i < k90; ++i) cum += basis.eigenvalues[i];
    CHECK(cum >= 0.9 * basis.total_variance - 1e-12);
}

}  // TEST_SUITE mfpca
