#include "idd/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <boost/math/distributions/normal.hpp>

#include "idd/rng.hpp"

namespace idd::synth {

namespace {

constexpr int kOrdinalClasses = 6;

// Seed-path tags for the per-stream RNG hierarchy.
enum : std::uint64_t {
    kTagMixture = 1,
    kTagBase0 = 2,
    kTagDeform = 3,
    kTagPostBase = 4,
    kTagReweight = 5,
    kTagReorder = 6,
    kTagDiscrete = 7,
};

double sample_beta(double alpha, double beta, std::mt19937_64& gen) {
    std::gamma_distribution<double> ga(alpha, 1.0), gb(beta, 1.0);
    double x = ga(gen);
    double y = gb(gen);
    if (x + y <= 0.0) return 0.5;  // both gamma draws underflowed
    return x / (x + y);
}

Eigen::MatrixXd sample_mixture(const MixtureSpec& mix, int n, int d, std::mt19937_64& gen) {
    std::discrete_distribution<int> pick(mix.weights.data(), mix.weights.data() + mix.weights.size());
    Eigen::MatrixXd out(n, d);
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXd& shape = mix.shapes[static_cast<std::size_t>(pick(gen))];
        for (int j = 0; j < d; ++j) out(i, j) = sample_beta(shape(j, 0), shape(j, 1), gen);
    }
    return out;
}

// Shift every component mean by delta on the logit scale, keeping each
// dimension's concentration alpha + beta fixed.
MixtureSpec shift_component_means(const MixtureSpec& mix, double delta) {
    MixtureSpec out = mix;
    for (auto& shape : out.shapes) {
        for (Eigen::Index j = 0; j < shape.rows(); ++j) {
            const double conc = shape(j, 0) + shape(j, 1);
            const double mean = shape(j, 0) / conc;
            const double logit = std::log(mean / (1.0 - mean)) + delta;
            const double shifted = 1.0 / (1.0 + std::exp(-logit));
            shape(j, 0) = shifted * conc;
            shape(j, 1) = (1.0 - shifted) * conc;
        }
    }
    return out;
}

// Paired multiplicative reweighting: components (0, 2) up and (1, 3) down by
// the same log-normal factor. With the default parallelogram mean layout and
// uniform weights this moves mixture mass without moving the global mean.
Eigen::VectorXd reweight_mixture(const Eigen::VectorXd& pi, double delta_mm,
                                 std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a = delta_mm * std::abs(normal(gen));
    Eigen::VectorXd eta(pi.size());
    for (Eigen::Index k = 0; k < pi.size(); ++k) eta[k] = std::exp((k % 2 == 0) ? a : -a);
    Eigen::VectorXd out = pi.cwiseProduct(eta);
    return out / out.sum();
}

std::vector<EmpiricalMeasure> wrap_batches(const std::vector<Eigen::MatrixXd>& raw) {
    std::vector<EmpiricalMeasure> out;
    out.reserve(raw.size());
    for (const auto& b : raw) out.push_back(EmpiricalMeasure::uniform(b));
    return out;
}

}  // namespace

void DeformationParams::validate() const {
    const Eigen::Index j = directions.rows();
    if (weights.size() != j || offsets.size() != j)
        throw ConfigError("deformation: directions, weights, offsets must agree in J");
    for (Eigen::Index i = 0; i < j; ++i)
        if (std::abs(directions.row(i).norm() - 1.0) > 1e-10)
            throw ConfigError("deformation: direction " + std::to_string(i) + " is not unit");
    if (weights.minCoeff() <= 0.0) throw ConfigError("deformation: weights must be positive");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw ConfigError("deformation: weights must sum to 1");
    if (!(magnitude >= 0.0) || !(smoothness > 0.0))
        throw ConfigError("deformation: need eps >= 0 and beta > 0");
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::barycenter: return "barycenter";
        case Scenario::mm_reweight: return "mm_reweight";
        case Scenario::copula_shift: return "copula_shift";
        case Scenario::poisson_spike: return "poisson_spike";
        case Scenario::ordinal_drift: return "ordinal_drift";
    }
    return "barycenter";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "barycenter") return Scenario::barycenter;
    if (name == "mm_reweight") return Scenario::mm_reweight;
    if (name == "copula_shift") return Scenario::copula_shift;
    if (name == "poisson_spike") return Scenario::poisson_spike;
    if (name == "ordinal_drift") return Scenario::ordinal_drift;
    throw ConfigError("unknown scenario '" + name + "'");
}

void MixtureSpec::validate(int d) const {
    if (shapes.empty()) throw ConfigError("mixture: no components");
    if (weights.size() != static_cast<Eigen::Index>(shapes.size()))
        throw ConfigError("mixture: weight count != component count");
    if (weights.minCoeff() < 0.0 || std::abs(weights.sum() - 1.0) > 1e-10)
        throw ConfigError("mixture: weights must form a simplex vector");
    for (const auto& s : shapes) {
        if (s.rows() != d || s.cols() != 2)
            throw ConfigError("mixture: each component needs d x 2 Beta shapes");
        if (s.minCoeff() <= 0.0) throw ConfigError("mixture: Beta shapes must be positive");
    }
}

void StreamSpec::validate() const {
    if (d < 1) throw ConfigError("stream: d must be >= 1");
    if (batch_size < 2) throw ConfigError("stream: batch size must be >= 2");
    if (horizon < 1) throw ConfigError("stream: horizon must be >= 1");
    if (change_point < 1 || change_point > horizon)
        throw ConfigError("stream: change point must lie in [1, horizon]");
    if (scenario == Scenario::copula_shift) {
        if (d < 2) throw ConfigError("copula_shift: undefined for d = 1");
        if (!(std::abs(rho) < 1.0)) throw ConfigError("copula_shift: |rho| must be < 1");
    }
    if (scenario == Scenario::poisson_spike) {
        if (!(lambda0 > 0.0)) throw ConfigError("poisson_spike: lambda0 must be > 0");
        if (alpha_mix < 0.0 || alpha_mix >= 1.0)
            throw ConfigError("poisson_spike: alpha must lie in [0, 1)");
        if (spike_value <= lambda0)
            throw ConfigError("poisson_spike: k* must exceed lambda0");
        if (heavy_tail && alpha_mix > 0.0 && heavy_rate * alpha_mix >= lambda0)
            throw ConfigError("poisson_spike: heavy-tail rates cannot match the mean");
    }
    if (scenario == Scenario::ordinal_drift) {
        if (ramp_length < 1) throw ConfigError("ordinal_drift: ramp length must be >= 1");
        if (ordinal_p0.size() != 0) {
            if (ordinal_p0.size() != kOrdinalClasses)
                throw ConfigError("ordinal_drift: p0 must have 6 classes");
            if (ordinal_p0.minCoeff() < 0.0 || std::abs(ordinal_p0.sum() - 1.0) > 1e-10)
                throw ConfigError("ordinal_drift: p0 must form a simplex vector");
        }
    }
    if (!mixture.empty()) mixture.validate(d);
}

MixtureSpec default_mixture(int d, std::uint64_t seed) {
    auto gen = rng::engine(rng::derive(seed, {kTagMixture}));
    std::uniform_real_distribution<double> center(0.42, 0.58);
    std::uniform_real_distribution<double> offset(0.10, 0.22);
    std::bernoulli_distribution sign(0.5);

    const double conc = 30.0;
    MixtureSpec mix;
    mix.weights = Eigen::VectorXd::Constant(4, 0.25);
    // Means form a parallelogram: m0 = c + v, m1 = c + w, m2 = c - v,
    // m3 = c - w, so m0 + m2 = m1 + m3.
    Eigen::VectorXd c(d), v(d), w(d);
    for (int j = 0; j < d; ++j) {
        c[j] = center(gen);
        v[j] = offset(gen) * (sign(gen) ? 1.0 : -1.0);
        w[j] = offset(gen) * (sign(gen) ? 1.0 : -1.0);
    }
    const std::array<Eigen::VectorXd, 4> means{c + v, c + w, c - v, c - w};
    for (const auto& m : means) {
        Eigen::MatrixXd shape(d, 2);
        for (int j = 0; j < d; ++j) {
            shape(j, 0) = m[j] * conc;
            shape(j, 1) = (1.0 - m[j]) * conc;
        }
        mix.shapes.push_back(std::move(shape));
    }
    return mix;
}

Eigen::MatrixXd sample_reference(const StreamSpec& spec, std::uint64_t seed) {
    spec.validate();
    MixtureSpec mix = spec.mixture.empty() ? default_mixture(spec.d, spec.seed) : spec.mixture;
    mix.validate(spec.d);
    auto gen = rng::engine(seed);
    return sample_mixture(mix, spec.batch_size, spec.d, gen);
}

double h_beta(double z, double beta) {
    // softplus(z) * sigmoid(z) at slope beta, in overflow-safe form
    const double bz = beta * z;
    const double softplus = (bz > 0.0 ? z : 0.0) + std::log1p(std::exp(-std::abs(bz))) / beta;
    const double sigmoid = bz >= 0.0 ? 1.0 / (1.0 + std::exp(-bz))
                                     : std::exp(bz) / (1.0 + std::exp(bz));
    return softplus * sigmoid;
}

Eigen::VectorXd apply_deformation(const DeformationParams& params, const Eigen::VectorXd& x) {
    Eigen::VectorXd out = x;
    for (Eigen::Index j = 0; j < params.directions.rows(); ++j) {
        const double z = params.directions.row(j).dot(x) - params.offsets[j];
        out += params.magnitude * params.weights[j] * h_beta(z, params.smoothness) *
               params.directions.row(j).transpose();
    }
    return out;
}

Eigen::MatrixXd apply_deformation(const DeformationParams& params, const Eigen::MatrixXd& points) {
    Eigen::MatrixXd out = points;
    for (Eigen::Index j = 0; j < params.directions.rows(); ++j) {
        Eigen::VectorXd z = points * params.directions.row(j).transpose();
        z.array() -= params.offsets[j];
        for (Eigen::Index i = 0; i < z.size(); ++i)
            out.row(i) += params.magnitude * params.weights[j] *
                          h_beta(z[i], params.smoothness) * params.directions.row(j);
    }
    return out;
}

DeformationParams random_deformation(int d, int j, double eps, double beta, std::uint64_t seed) {
    if (d < 1 || j < 1) throw ConfigError("random_deformation: need d >= 1 and J >= 1");
    auto gen = rng::engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    DeformationParams params;
    params.magnitude = eps;
    params.smoothness = beta;
    params.directions.resize(j, d);
    params.weights.resize(j);
    params.offsets.resize(j);
    for (int r = 0; r < j; ++r) {
        Eigen::RowVectorXd a(d);
        double norm = 0.0;
        while (norm < 1e-12) {
            for (int k = 0; k < d; ++k) a[k] = normal(gen);
            norm = a.norm();
        }
        params.directions.row(r) = a / norm;
        params.weights[r] = expo(gen);  // Dirichlet(1) after normalization
        // offset uniform over the projection range of [0,1]^d
        double lo = 0.0, hi = 0.0;
        for (int k = 0; k < d; ++k) {
            lo += std::min(0.0, params.directions(r, k));
            hi += std::max(0.0, params.directions(r, k));
        }
        params.offsets[r] = std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    params.weights /= params.weights.sum();
    params.validate();
    return params;
}

MonotonicityReport monotonicity_check(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map, int dim, int n_pairs,
    std::uint64_t seed) {
    if (n_pairs < 1) throw ConfigError("monotonicity_check: need n_pairs >= 1");
    auto gen = rng::engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x(dim), y(dim);
    for (int p = 0; p < n_pairs; ++p) {
        for (int k = 0; k < dim; ++k) {
            x[k] = unif(gen);
            y[k] = unif(gen);
        }
        const double margin = (map(x) - map(y)).dot(x - y);
        worst = std::min(worst, margin);
    }
    return {worst >= -1e-10, worst};
}

MonotonicityReport monotonicity_check(const DeformationParams& params, int n_pairs,
                                      std::uint64_t seed) {
    params.validate();
    const int d = static_cast<int>(params.directions.cols());
    return monotonicity_check(
        [&params](const Eigen::VectorXd& x) { return apply_deformation(params, x); }, d, n_pairs,
        seed);
}

Eigen::MatrixXd iman_conover(const Eigen::MatrixXd& base, double rho, std::uint64_t seed) {
    const Eigen::Index n = base.rows();
    const Eigen::Index d = base.cols();
    if (d < 2) throw ConfigError("iman_conover: needs d >= 2");
    if (!(std::abs(rho) < 1.0)) throw ConfigError("iman_conover: |rho| must be < 1");
    if (rho <= -1.0 / static_cast<double>(d - 1))
        throw ConfigError("iman_conover: equicorrelation not positive definite");
    if (n < 3) throw ConfigError("iman_conover: needs at least 3 rows");

    auto gen = rng::engine(seed);
    boost::math::normal_distribution<double> normal01;

    // Van der Waerden scores, independently permuted per column.
    Eigen::VectorXd scores(n);
    for (Eigen::Index i = 0; i < n; ++i)
        scores[i] = boost::math::quantile(normal01, (static_cast<double>(i) + 1.0) / (n + 1.0));
    Eigen::MatrixXd m(n, d);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (Eigen::Index j = 0; j < d; ++j) {
        std::shuffle(perm.begin(), perm.end(), gen);
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = scores[perm[static_cast<std::size_t>(i)]];
    }

    // Correct the accidental correlation of the score matrix, then induce the
    // target: with E = corr(M) = F F' and C = L L', T = M F^-T L' has
    // sample correlation C.
    Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
    Eigen::MatrixXd e = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::MatrixXd target = Eigen::MatrixXd::Constant(d, d, rho);
    target.diagonal().setConstant(1.0);

    Eigen::LLT<Eigen::MatrixXd> llt_e(e);
    Eigen::LLT<Eigen::MatrixXd> llt_c(target);
    if (llt_e.info() != Eigen::Success || llt_c.info() != Eigen::Success)
        throw ConfigError("iman_conover: Cholesky factorization failed");
    Eigen::MatrixXd f_inv_t =
        llt_e.matrixL().transpose().solve(Eigen::MatrixXd::Identity(d, d));
    Eigen::MatrixXd t = m * f_inv_t * llt_c.matrixL().transpose();

    // Rank-match: column j of the output carries the sorted data values
    // arranged according to the ranks of t's column j.
    Eigen::MatrixXd out(n, d);
    std::vector<Eigen::Index> rank(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<double> column(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = base(i, j);
        std::sort(column.begin(), column.end());

        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return t(a, j) < t(b, j); });
        for (Eigen::Index pos = 0; pos < n; ++pos)
            out(rank[static_cast<std::size_t>(pos)], j) = column[static_cast<std::size_t>(pos)];
    }
    return out;
}

namespace {

std::vector<Eigen::MatrixXd> gen_continuous_raw(const StreamSpec& spec) {
    spec.validate();
    if (spec.scenario != Scenario::barycenter && spec.scenario != Scenario::mm_reweight &&
        spec.scenario != Scenario::copula_shift)
        throw ConfigError("gen_stream_continuous: not a continuous scenario");

    MixtureSpec mix = spec.mixture.empty() ? default_mixture(spec.d, spec.seed) : spec.mixture;
    mix.validate(spec.d);

    auto base_gen = rng::engine(rng::derive(spec.seed, {kTagBase0}));
    Eigen::MatrixXd base0 = sample_mixture(mix, spec.batch_size, spec.d, base_gen);

    Eigen::MatrixXd base1;
    if (spec.change_point < spec.horizon) {
        auto post_gen = rng::engine(rng::derive(spec.seed, {kTagPostBase}));
        switch (spec.scenario) {
            case Scenario::barycenter: {
                MixtureSpec shifted = shift_component_means(mix, spec.delta_loc);
                base1 = sample_mixture(shifted, spec.batch_size, spec.d, post_gen);
                break;
            }
            case Scenario::mm_reweight: {
                auto eta_gen = rng::engine(rng::derive(spec.seed, {kTagReweight}));
                MixtureSpec reweighted = mix;
                reweighted.weights = reweight_mixture(mix.weights, spec.delta_mm, eta_gen);
                base1 = sample_mixture(reweighted, spec.batch_size, spec.d, post_gen);
                break;
            }
            case Scenario::copula_shift:
                base1 = iman_conover(base0, spec.rho, rng::derive(spec.seed, {kTagReorder}));
                break;
            default: break;
        }
    }

    std::vector<Eigen::MatrixXd> raw;
    raw.reserve(static_cast<std::size_t>(spec.horizon));
    for (int t = 1; t <= spec.horizon; ++t) {
        DeformationParams params =
            random_deformation(spec.d, spec.deform_j, spec.deform_eps, spec.deform_beta,
                               rng::derive(spec.seed, {kTagDeform, static_cast<std::uint64_t>(t)}));
        const Eigen::MatrixXd& base = (t <= spec.change_point) ? base0 : base1;
        raw.push_back(apply_deformation(params, base));
    }
    return raw;
}

std::vector<Eigen::MatrixXd> gen_poisson_raw(const StreamSpec& spec) {
    spec.validate();
    if (spec.scenario != Scenario::poisson_spike)
        throw ConfigError("gen_stream_poisson_spike: wrong scenario");

    auto gen = rng::engine(rng::derive(spec.seed, {kTagDiscrete}));
    std::poisson_distribution<int> background(spec.lambda0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Heavy-tail variant: two Poisson sources with the global mean matched to
    // lambda0, low rate solved in closed form.
    const double low_rate = spec.heavy_tail && spec.alpha_mix > 0.0
                                ? (spec.lambda0 - spec.alpha_mix * spec.heavy_rate) /
                                      (1.0 - spec.alpha_mix)
                                : spec.lambda0;
    std::poisson_distribution<int> low(low_rate > 0.0 ? low_rate : spec.lambda0);
    std::poisson_distribution<int> high(spec.heavy_rate);

    std::vector<Eigen::MatrixXd> raw;
    raw.reserve(static_cast<std::size_t>(spec.horizon));
    for (int t = 1; t <= spec.horizon; ++t) {
        Eigen::MatrixXd batch(spec.batch_size, 1);
        const bool post = t > spec.change_point;
        for (int i = 0; i < spec.batch_size; ++i) {
            int value;
            if (!post) {
                value = background(gen);
            } else if (spec.heavy_tail) {
                value = (unif(gen) < spec.alpha_mix) ? high(gen) : low(gen);
            } else {
                value = (unif(gen) < spec.alpha_mix) ? spec.spike_value : background(gen);
            }
            batch(i, 0) = static_cast<double>(value);
        }
        raw.push_back(std::move(batch));
    }
    return raw;
}

std::vector<Eigen::MatrixXd> gen_ordinal_raw(const StreamSpec& spec) {
    spec.validate();
    if (spec.scenario != Scenario::ordinal_drift)
        throw ConfigError("gen_stream_ordinal_drift: wrong scenario");

    Eigen::VectorXd p0 = spec.ordinal_p0;
    if (p0.size() == 0) {
        p0.resize(kOrdinalClasses);
        p0 << 0.25, 0.20, 0.20, 0.15, 0.12, 0.08;
    }
    // Mass moves to the adjacent higher class; the top class absorbs the two
    // highest original classes.
    Eigen::VectorXd p_shift = Eigen::VectorXd::Zero(kOrdinalClasses);
    for (int j = 1; j < kOrdinalClasses - 1; ++j) p_shift[j] = p0[j - 1];
    p_shift[kOrdinalClasses - 1] = p0[kOrdinalClasses - 2] + p0[kOrdinalClasses - 1];

    auto gen = rng::engine(rng::derive(spec.seed, {kTagDiscrete}));
    std::vector<Eigen::MatrixXd> raw;
    raw.reserve(static_cast<std::size_t>(spec.horizon));
    for (int t = 1; t <= spec.horizon; ++t) {
        double gamma = 0.0;
        if (t > spec.change_point)
            gamma = std::min(1.0, static_cast<double>(t - spec.change_point) / spec.ramp_length);
        Eigen::VectorXd pt = (1.0 - gamma) * p0 + gamma * p_shift;
        std::discrete_distribution<int> pick(pt.data(), pt.data() + pt.size());
        Eigen::MatrixXd batch(spec.batch_size, 1);
        for (int i = 0; i < spec.batch_size; ++i)
            batch(i, 0) = static_cast<double>(pick(gen) + 1);  // classes at 1..M
        raw.push_back(std::move(batch));
    }
    return raw;
}

}  // namespace

std::vector<EmpiricalMeasure> gen_stream_continuous(const StreamSpec& spec) {
    return wrap_batches(gen_continuous_raw(spec));
}

std::vector<EmpiricalMeasure> gen_stream_poisson_spike(const StreamSpec& spec) {
    return wrap_batches(gen_poisson_raw(spec));
}

std::vector<EmpiricalMeasure> gen_stream_ordinal_drift(const StreamSpec& spec) {
    return wrap_batches(gen_ordinal_raw(spec));
}

std::vector<Eigen::MatrixXd> gen_stream_raw(const StreamSpec& spec) {
    switch (spec.scenario) {
        case Scenario::poisson_spike: return gen_poisson_raw(spec);
        case Scenario::ordinal_drift: return gen_ordinal_raw(spec);
        default: return gen_continuous_raw(spec);
    }
}

std::vector<EmpiricalMeasure> gen_stream(const StreamSpec& spec) {
    return wrap_batches(gen_stream_raw(spec));
}

}  // namespace idd::synth
