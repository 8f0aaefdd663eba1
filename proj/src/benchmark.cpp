#include "idd/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "idd/baselines.hpp"
#include "idd/rng.hpp"

namespace idd::harness {

namespace {

// Threshold-ratio trajectories of one replication: alarm at scale s at the
// first t with value > s.
struct Trajectories {
    std::vector<double> null_ratio;
    std::vector<double> change_ratio;
};

double safe_ratio(double stat, double threshold) {
    if (threshold > 0.0) return stat / threshold;
    return stat > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// Detector-agnostic view: calibrate once, then score monitoring batches.
class RatioScorer {
  public:
    virtual ~RatioScorer() = default;
    virtual double operator()(const Eigen::MatrixXd& raw, const EmpiricalMeasure& mu) const = 0;
};

class IddScorer final : public RatioScorer {
  public:
    IddScorer(const std::vector<EmpiricalMeasure>& calibration, const DetectorConfig& config)
        : model_(calibrate(calibration, config)) {}
    double operator()(const Eigen::MatrixXd&, const EmpiricalMeasure& mu) const override {
        ChartStatistics stats = chart_statistics(model_.basis, tangent_at(model_, mu));
        return std::max(safe_ratio(stats.t2, model_.h_t2), safe_ratio(stats.spe, model_.h_spe));
    }

  private:
    MonitorModel model_;
};

class HotellingScorer final : public RatioScorer {
  public:
    HotellingScorer(const std::vector<Eigen::MatrixXd>& calibration, double alpha)
        : model_(baselines::hotelling_calibrate(calibration, alpha)) {}
    double operator()(const Eigen::MatrixXd& raw, const EmpiricalMeasure&) const override {
        return safe_ratio(baselines::hotelling_statistic(model_, raw), model_.threshold);
    }

  private:
    baselines::HotellingMeanModel model_;
};

class CountChartScorer final : public RatioScorer {
  public:
    explicit CountChartScorer(const std::vector<Eigen::MatrixXd>& calibration)
        : model_(baselines::count_chart_calibrate(calibration)) {}
    double operator()(const Eigen::MatrixXd& raw, const EmpiricalMeasure&) const override {
        return safe_ratio(baselines::count_chart_statistic(model_, raw), model_.z_threshold);
    }

  private:
    baselines::CountChartModel model_;
};

class MaxDevScorer final : public RatioScorer {
  public:
    MaxDevScorer(const std::vector<Eigen::MatrixXd>& calibration, int categories, double alpha)
        : model_(baselines::max_dev_calibrate(calibration, categories, alpha)) {}
    double operator()(const Eigen::MatrixXd& raw, const EmpiricalMeasure&) const override {
        return safe_ratio(baselines::max_dev_statistic(model_, raw), model_.threshold);
    }

  private:
    baselines::MaxDevModel model_;
};

std::unique_ptr<RatioScorer> make_scorer(const DetectorSpec& spec,
                                         const ReplicationStream& streams) {
    if (spec.name == "idd") return std::make_unique<IddScorer>(streams.calibration, spec.idd);
    if (spec.name == "hotelling")
        return std::make_unique<HotellingScorer>(streams.calibration_raw, spec.baseline_alpha);
    if (spec.name == "count_chart")
        return std::make_unique<CountChartScorer>(streams.calibration_raw);
    if (spec.name == "max_dev")
        return std::make_unique<MaxDevScorer>(streams.calibration_raw, spec.max_dev_categories,
                                              spec.baseline_alpha);
    throw ConfigError("unknown detector '" + spec.name +
                      "' (idd | hotelling | count_chart | max_dev)");
}

// First index with ratio > scale (1-based), or horizon when censored.
struct TauResult {
    int tau;
    bool censored;
};

TauResult first_alarm(const std::vector<double>& ratio, double scale) {
    for (std::size_t t = 0; t < ratio.size(); ++t)
        if (ratio[t] > scale) return {static_cast<int>(t) + 1, false};
    return {static_cast<int>(ratio.size()), true};
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    if (xs.size() == 1) return {m, 0.0};
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= static_cast<double>(xs.size() - 1);
    return {m, std::sqrt(var / static_cast<double>(xs.size()))};
}

double estimate_arl0(const std::vector<Trajectories>& trajectories, double scale) {
    double acc = 0.0;
    for (const auto& tr : trajectories) acc += first_alarm(tr.null_ratio, scale).tau;
    return acc / static_cast<double>(trajectories.size());
}

}  // namespace

void BenchmarkConfig::validate() const {
    if (replications < 1) throw ConfigError("benchmark: replications must be >= 1");
    if (detectors.empty()) throw ConfigError("benchmark: no detectors configured");
    if (target_arl0.empty()) throw ConfigError("benchmark: no target ARL0 values");
    if (n0 < 3) throw ConfigError("benchmark: n0 must be >= 3");
    if (kappa < 1) throw ConfigError("benchmark: kappa must be >= 1");
    for (double target : target_arl0) {
        if (!(target > 0.0)) throw ConfigError("benchmark: target ARL0 must be positive");
        if (target <= n0)
            throw ConfigError("benchmark: target ARL0 must exceed the calibration length n0");
    }
    if (match_tol <= 0.0) throw ConfigError("benchmark: match_tol must be > 0");
    if (bisection_steps < 1) throw ConfigError("benchmark: bisection_steps must be >= 1");
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    config.validate();
    const double max_target = *std::max_element(config.target_arl0.begin(), config.target_arl0.end());
    const int null_h = config.monitor_horizon > 0
                           ? config.monitor_horizon
                           : static_cast<int>(std::lround(10.0 * max_target));
    const int change_h = config.change_horizon > 0
                             ? config.change_horizon
                             : std::min(null_h, config.kappa + 300);
    if (config.kappa >= change_h)
        throw ConfigError("benchmark: kappa must precede the change-run horizon");

    BenchmarkReport report;
    report.config = config;

    const int r = config.replications;
    const int r_null = std::max(r, config.null_replications);
    int n_threads = config.threads > 0 ? config.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, r_null);

    for (const auto& det : config.detectors) {
        const auto t_start = std::chrono::steady_clock::now();

        // Phase 1: per-replication trajectories, parallel over replications.
        // Replications beyond `replications` contribute null runs only, for a
        // finer ARL0 estimate during threshold matching.
        std::vector<Trajectories> trajectories(static_cast<std::size_t>(r_null));
        std::atomic<int> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;

        auto worker = [&]() {
            for (int rep = next.fetch_add(1); rep < r_null; rep = next.fetch_add(1)) {
                try {
                    const std::uint64_t rep_seed =
                        rng::derive(config.seed, {0xBE}) + static_cast<std::uint64_t>(rep);

                    // Null and changed streams share the replication seed, so
                    // their calibration segments (and all pre-change batches)
                    // coincide; one calibrated model serves both trajectories.
                    ReplicationStream null_stream =
                        make_replication(config.stream, config.n0, null_h, 0, rep_seed);
                    auto scorer = make_scorer(det, null_stream);

                    Trajectories tr;
                    tr.null_ratio.reserve(static_cast<std::size_t>(null_h));
                    for (int t = 1; t <= null_h; ++t) {
                        Eigen::MatrixXd raw = null_stream.monitor_raw(t);
                        tr.null_ratio.push_back(
                            (*scorer)(raw, EmpiricalMeasure::uniform(raw)));
                    }
                    if (rep < r) {
                        ReplicationStream change_stream = make_replication(
                            config.stream, config.n0, change_h, config.kappa, rep_seed);
                        tr.change_ratio.reserve(static_cast<std::size_t>(change_h));
                        for (int t = 1; t <= change_h; ++t) {
                            Eigen::MatrixXd raw = change_stream.monitor_raw(t);
                            tr.change_ratio.push_back(
                                (*scorer)(raw, EmpiricalMeasure::uniform(raw)));
                        }
                    }
                    trajectories[static_cast<std::size_t>(rep)] = std::move(tr);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);

        // Phase 2: per-target threshold matching and aggregation.
        for (double target : config.target_arl0) {
            BenchmarkCell cell;
            cell.detector = det.name;
            cell.target_arl0 = target;

            double lo = 0.0;
            double hi = 0.0;
            for (const auto& tr : trajectories)
                for (double v : tr.null_ratio) hi = std::max(hi, v);
            hi = std::max(hi * 1.01, 1e-6);

            double best_scale = 1.0;
            double best_gap = std::numeric_limits<double>::infinity();
            for (int it = 0; it < config.bisection_steps; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double est = estimate_arl0(trajectories, mid);
                const double gap = std::abs(est - target);
                if (gap < best_gap) {
                    best_gap = gap;
                    best_scale = mid;
                }
                if (gap <= config.match_tol * target) break;
                if (est < target)
                    lo = mid;
                else
                    hi = mid;
            }
            cell.scale = best_scale;
            cell.matched = best_gap <= config.match_tol * target;
            report.all_matched = report.all_matched && cell.matched;

            std::vector<double> null_taus, delays;
            int past_kappa = 0, detected = 0, false_alarms = 0;
            for (const auto& tr : trajectories) {
                TauResult null_tau = first_alarm(tr.null_ratio, best_scale);
                null_taus.push_back(null_tau.tau);
                cell.censored_null += null_tau.censored ? 1 : 0;

                if (tr.change_ratio.empty()) continue;  // matching-only replication
                TauResult change_tau = first_alarm(tr.change_ratio, best_scale);
                if (change_tau.tau <= config.kappa && !change_tau.censored) {
                    ++false_alarms;
                    continue;  // alarm before the change; no delay observation
                }
                ++past_kappa;
                delays.push_back(static_cast<double>(change_tau.tau - config.kappa));
                if (change_tau.censored)
                    ++cell.censored_change;
                else
                    ++detected;
            }
            MeanSe arl0 = mean_se(null_taus);
            MeanSe arl1 = mean_se(delays);
            cell.arl0 = arl0.mean;
            cell.arl0_se = arl0.se;
            cell.arl1 = arl1.mean;
            cell.arl1_se = arl1.se;
            cell.detection_rate = past_kappa > 0 ? static_cast<double>(detected) / past_kappa : 0.0;
            cell.false_alarm_rate = static_cast<double>(false_alarms) / r;
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                               .count();
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

namespace {

nlohmann::json cell_to_json(const BenchmarkCell& cell) {
    return {
        {"detector", cell.detector},
        {"target_arl0", cell.target_arl0},
        {"matched", cell.matched},
        {"scale", cell.scale},
        {"arl0", cell.arl0},
        {"arl0_se", cell.arl0_se},
        {"censored_null", cell.censored_null},
        {"arl1", cell.arl1},
        {"arl1_se", cell.arl1_se},
        {"censored_change", cell.censored_change},
        {"detection_rate", cell.detection_rate},
        {"false_alarm_rate", cell.false_alarm_rate},
        {"seconds", cell.seconds},
    };
}

}  // namespace

void write_report_json(const std::string& path, const BenchmarkReport& report) {
    nlohmann::json j;
    j["schema_version"] = report.schema_version;
    j["all_matched"] = report.all_matched;
    j["config"] = {
        {"stream_kind", report.config.stream.kind},
        {"d", report.config.stream.spec.d},
        {"batch_size", report.config.stream.spec.batch_size},
        {"replications", report.config.replications},
        {"n0", report.config.n0},
        {"kappa", report.config.kappa},
        {"seed", report.config.seed},
    };
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.cells) cells.push_back(cell_to_json(c));
    j["cells"] = std::move(cells);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing report to '" + path + "'");
}

void write_report_csv(const std::string& path, const BenchmarkReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "detector,target_arl0,matched,scale,arl0,arl0_se,censored_null,arl1,arl1_se,"
           "censored_change,detection_rate,false_alarm_rate,seconds\n";
    out.precision(12);
    for (const auto& c : report.cells)
        out << c.detector << ',' << c.target_arl0 << ',' << (c.matched ? 1 : 0) << ',' << c.scale
            << ',' << c.arl0 << ',' << c.arl0_se << ',' << c.censored_null << ',' << c.arl1 << ','
            << c.arl1_se << ',' << c.censored_change << ',' << c.detection_rate << ','
            << c.false_alarm_rate << ',' << c.seconds << "\n";
    if (!out) throw IoError("failed writing report to '" + path + "'");
}

}  // namespace idd::harness
