#include "idd/stream_factory.hpp"

#include <memory>
#include <random>

#include "idd/rng.hpp"

namespace idd::harness {

namespace {

Eigen::MatrixXd gauss_batch(int n, int d, double sigma, double shift, std::uint64_t seed) {
    auto gen = rng::engine(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    Eigen::MatrixXd b(n, d);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = dist(gen);
    b.col(0).array() += shift;
    return b;
}

}  // namespace

bool is_gaussian_kind(const std::string& kind) { return kind == "gaussian_translation"; }

ReplicationStream make_replication(const StreamConfig& config, int n0, int horizon, int kappa,
                                   std::uint64_t seed) {
    if (n0 < 1 || horizon < 1) throw ConfigError("replication: n0 and horizon must be >= 1");
    if (kappa < 0 || kappa > horizon)
        throw ConfigError("replication: kappa must lie in [0, horizon]");

    ReplicationStream out;
    if (is_gaussian_kind(config.kind)) {
        const int n = config.spec.batch_size;
        const int d = config.spec.d;
        const double sigma = config.gauss_sigma;
        const double delta = config.gauss_delta;
        out.calibration_raw.reserve(static_cast<std::size_t>(n0));
        for (int t = 1; t <= n0; ++t)
            out.calibration_raw.push_back(
                gauss_batch(n, d, sigma, 0.0, rng::derive(seed, {1, static_cast<std::uint64_t>(t)})));
        auto raw = [n, d, sigma, delta, kappa, seed](int t) {
            const double shift = (kappa > 0 && t > kappa) ? delta : 0.0;
            return gauss_batch(n, d, sigma, shift,
                               rng::derive(seed, {2, static_cast<std::uint64_t>(t)}));
        };
        out.monitor_raw = raw;
    } else {
        // Deformation / discrete scenarios: one long stream of n0 + horizon
        // batches with the change at n0 + kappa, then split into phases so the
        // fixed base sample is shared between calibration and monitoring.
        synth::StreamSpec spec = config.spec;
        spec.scenario = synth::scenario_from_string(config.kind);
        spec.seed = seed;
        spec.horizon = n0 + horizon;
        spec.change_point = (kappa > 0) ? n0 + kappa : spec.horizon;
        auto stream = std::make_shared<std::vector<Eigen::MatrixXd>>(synth::gen_stream_raw(spec));

        out.calibration_raw.assign(stream->begin(), stream->begin() + n0);
        out.monitor_raw = [stream, n0](int t) {
            const std::size_t idx = static_cast<std::size_t>(n0 + t - 1);
            if (idx >= stream->size()) throw ConfigError("monitor stream exhausted");
            return (*stream)[idx];
        };
    }

    out.calibration.reserve(out.calibration_raw.size());
    for (const auto& b : out.calibration_raw)
        out.calibration.push_back(EmpiricalMeasure::uniform(b));
    out.monitor = [raw = out.monitor_raw](int t) { return EmpiricalMeasure::uniform(raw(t)); };
    return out;
}

std::vector<Eigen::MatrixXd> make_raw_stream(const StreamConfig& config, std::uint64_t seed) {
    if (is_gaussian_kind(config.kind)) {
        std::vector<Eigen::MatrixXd> out;
        const auto& s = config.spec;
        out.reserve(static_cast<std::size_t>(s.horizon));
        for (int t = 1; t <= s.horizon; ++t) {
            const double shift = t > s.change_point ? config.gauss_delta : 0.0;
            out.push_back(gauss_batch(s.batch_size, s.d, config.gauss_sigma, shift,
                                      rng::derive(seed, {2, static_cast<std::uint64_t>(t)})));
        }
        return out;
    }
    synth::StreamSpec spec = config.spec;
    spec.scenario = synth::scenario_from_string(config.kind);
    spec.seed = seed;
    return synth::gen_stream_raw(spec);
}

}  // namespace idd::harness
