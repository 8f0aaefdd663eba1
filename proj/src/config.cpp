#include "idd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace idd::harness {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("config: bad value for '") + key + "'");
        }
    }
}

Eigen::VectorXd read_vector(const json& arr, const char* key) {
    if (!arr.is_array()) throw ConfigError(std::string("config: '") + key + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto& e = arr[static_cast<std::size_t>(i)];
        if (!e.is_number()) throw ConfigError(std::string("config: '") + key + "' must be numeric");
        v[i] = e.get<double>();
    }
    return v;
}

void parse_mixture(const json& jm, synth::MixtureSpec& mix) {
    reject_unknown(jm, {"weights", "shapes"}, "stream.mixture");
    if (jm.contains("weights")) mix.weights = read_vector(jm.at("weights"), "mixture.weights");
    if (jm.contains("shapes")) {
        for (const auto& comp : jm.at("shapes")) {
            Eigen::MatrixXd shape(static_cast<Eigen::Index>(comp.size()), 2);
            for (Eigen::Index r = 0; r < shape.rows(); ++r) {
                const auto& pair = comp[static_cast<std::size_t>(r)];
                if (!pair.is_array() || pair.size() != 2)
                    throw ConfigError("config: mixture shapes must be [alpha, beta] pairs");
                shape(r, 0) = pair[0].get<double>();
                shape(r, 1) = pair[1].get<double>();
            }
            mix.shapes.push_back(std::move(shape));
        }
    }
    if (mix.shapes.empty() != (mix.weights.size() == 0))
        throw ConfigError("config: mixture needs both weights and shapes");
}

void parse_stream(const json& js, StreamConfig& stream) {
    reject_unknown(js,
                   {"kind", "d", "batch_size", "horizon", "change_point", "seed", "delta_loc",
                    "delta_mm", "rho", "deform_j", "deform_beta", "deform_eps", "lambda0",
                    "alpha_mix", "spike_value", "heavy_tail", "heavy_rate", "ramp_length",
                    "ordinal_p0", "gauss_sigma", "gauss_delta", "mixture"},
                   "stream");
    read(js, "kind", stream.kind);
    read(js, "d", stream.spec.d);
    read(js, "batch_size", stream.spec.batch_size);
    read(js, "horizon", stream.spec.horizon);
    read(js, "change_point", stream.spec.change_point);
    read(js, "seed", stream.spec.seed);
    read(js, "delta_loc", stream.spec.delta_loc);
    read(js, "delta_mm", stream.spec.delta_mm);
    read(js, "rho", stream.spec.rho);
    read(js, "deform_j", stream.spec.deform_j);
    read(js, "deform_beta", stream.spec.deform_beta);
    read(js, "deform_eps", stream.spec.deform_eps);
    read(js, "lambda0", stream.spec.lambda0);
    read(js, "alpha_mix", stream.spec.alpha_mix);
    read(js, "spike_value", stream.spec.spike_value);
    read(js, "heavy_tail", stream.spec.heavy_tail);
    read(js, "heavy_rate", stream.spec.heavy_rate);
    read(js, "ramp_length", stream.spec.ramp_length);
    if (js.contains("ordinal_p0"))
        stream.spec.ordinal_p0 = read_vector(js.at("ordinal_p0"), "ordinal_p0");
    read(js, "gauss_sigma", stream.gauss_sigma);
    read(js, "gauss_delta", stream.gauss_delta);
    if (js.contains("mixture")) parse_mixture(js.at("mixture"), stream.spec.mixture);
    if (!is_gaussian_kind(stream.kind))
        stream.spec.scenario = synth::scenario_from_string(stream.kind);
}

void parse_detector(const json& jd, DetectorConfig& det) {
    reject_unknown(jd,
                   {"alpha_t2", "alpha_spe", "k_override", "variance_fraction", "m_atoms",
                    "bary_tol", "bary_max_iter", "bary_seed", "solver", "eps_scale",
                    "marginal_tol", "solver_max_iter", "round_cap"},
                   "detector");
    read(jd, "alpha_t2", det.alpha_t2);
    read(jd, "alpha_spe", det.alpha_spe);
    read(jd, "k_override", det.mfpca.k_override);
    read(jd, "variance_fraction", det.mfpca.variance_fraction);
    read(jd, "m_atoms", det.barycenter.m_atoms);
    read(jd, "bary_tol", det.barycenter.tol);
    read(jd, "bary_max_iter", det.barycenter.max_iter);
    read(jd, "bary_seed", det.barycenter.init_seed);
    if (jd.contains("solver"))
        det.solver.method = plan_method_from_string(jd.at("solver").get<std::string>());
    read(jd, "eps_scale", det.solver.eps_scale);
    read(jd, "marginal_tol", det.solver.marginal_tol);
    read(jd, "solver_max_iter", det.solver.max_iter);
    read(jd, "round_cap", det.solver.round_cap);
}

void parse_benchmark(const json& jb, const StreamConfig& stream, const DetectorConfig& det,
                     BenchmarkConfig& bench) {
    reject_unknown(jb,
                   {"detectors", "target_arl0", "replications", "null_replications", "n0",
                    "kappa", "monitor_horizon", "change_horizon", "threads", "baseline_alpha",
                    "max_dev_categories", "bisection_steps", "match_tol"},
                   "benchmark");
    bench.stream = stream;

    std::vector<std::string> names{"idd"};
    if (jb.contains("detectors")) {
        names.clear();
        for (const auto& n : jb.at("detectors")) names.push_back(n.get<std::string>());
    }
    double baseline_alpha = 0.02;
    int max_dev_categories = 6;
    read(jb, "baseline_alpha", baseline_alpha);
    read(jb, "max_dev_categories", max_dev_categories);
    for (const auto& name : names) {
        DetectorSpec spec;
        spec.name = name;
        spec.idd = det;
        spec.baseline_alpha = baseline_alpha;
        spec.max_dev_categories = max_dev_categories;
        bench.detectors.push_back(std::move(spec));
    }

    if (jb.contains("target_arl0")) {
        bench.target_arl0.clear();
        for (const auto& t : jb.at("target_arl0")) bench.target_arl0.push_back(t.get<double>());
    }
    read(jb, "replications", bench.replications);
    read(jb, "null_replications", bench.null_replications);
    read(jb, "n0", bench.n0);
    read(jb, "kappa", bench.kappa);
    read(jb, "monitor_horizon", bench.monitor_horizon);
    read(jb, "change_horizon", bench.change_horizon);
    read(jb, "threads", bench.threads);
    read(jb, "bisection_steps", bench.bisection_steps);
    read(jb, "match_tol", bench.match_tol);
    bench.seed = stream.spec.seed;
}

}  // namespace

FileConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(j, {"schema_version", "stream", "detector", "benchmark"}, "the top level");
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        throw ConfigError("config: unsupported schema_version");

    FileConfig out;
    if (j.contains("stream")) parse_stream(j.at("stream"), out.stream);
    if (j.contains("detector")) parse_detector(j.at("detector"), out.detector);
    parse_benchmark(j.contains("benchmark") ? j.at("benchmark") : json::object(), out.stream,
                    out.detector, out.benchmark);
    return out;
}

FileConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_schema() {
    return R"(Config file schema (JSON, schema_version 1). Every key is optional;
unknown keys are rejected. Defaults in parentheses.

{
  "schema_version": 1,
  "stream": {
    "kind": "barycenter | mm_reweight | copula_shift | poisson_spike |
             ordinal_drift | gaussian_translation"      ("barycenter"),
    "d": int >= 1                                        (2),
    "batch_size": int >= 2                               (100),
    "horizon": int, stream length for simulate           (100),
    "change_point": int in [1, horizon]                  (50),
    "seed": unsigned                                     (0),
    "delta_loc": S1 logit-scale location shift           (0.15),
    "delta_mm": S2 log-normal reweighting spread         (2.0),
    "rho": S3 target equicorrelation, |rho| < 1          (0.6),
    "deform_j": ridge directions J                       (3),
    "deform_beta": ridge smoothness                      (5.0),
    "deform_eps": deformation magnitude                  (0.3),
    "lambda0": Poisson rate                              (5.0),
    "alpha_mix": spike proportion in [0, 1)              (0.05),
    "spike_value": spike location k* > lambda0           (25),
    "heavy_tail": mean-matched two-rate variant          (false),
    "heavy_rate": high rate of the heavy-tail variant    (15.0),
    "ramp_length": ordinal drift ramp                    (30),
    "ordinal_p0": [6 probabilities]                      (built-in pmf),
    "gauss_sigma": gaussian_translation noise sd         (0.5),
    "gauss_delta": gaussian_translation mean shift       (0.5),
    "mixture": {"weights": [...], "shapes": [[[a, b] per dim] per comp]}
                                                         (seeded default)
  },
  "detector": {
    "alpha_t2": (0.01), "alpha_spe": (0.01),
    "k_override": 0 = explained-variance rule            (0),
    "variance_fraction": (0.9),
    "m_atoms": barycenter atom budget                    (128),
    "bary_tol": (1e-5), "bary_max_iter": (50), "bary_seed": (0),
    "solver": "sinkhorn | exact_1d | auto"               ("sinkhorn"),
    "eps_scale": eps = scale x median cost               (5e-3),
    "marginal_tol": (1e-7), "solver_max_iter": (10000),
    "round_cap": stall-exit rounding cap                 (1e-4)
  },
  "benchmark": {
    "detectors": ["idd", "hotelling", "count_chart", "max_dev"]  (["idd"]),
    "target_arl0": [targets, each > n0]                  ([100]),
    "replications": (10),
    "null_replications": extra in-control runs for matching, 0 = replications (0),
    "n0": (50), "kappa": (20),
    "monitor_horizon": 0 = 10 x max target               (0),
    "change_horizon": 0 = min(monitor_horizon, kappa+300) (0),
    "threads": 0 = hardware                              (0),
    "baseline_alpha": order-statistic level for baselines (0.02),
    "max_dev_categories": (6),
    "bisection_steps": (40), "match_tol": (0.05)
  }
}
)";
}

}  // namespace idd::harness
