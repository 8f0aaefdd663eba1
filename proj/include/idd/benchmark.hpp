#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idd/detector.hpp"
#include "idd/stream_factory.hpp"

namespace idd::harness {

/// One detector entry in a benchmark: the intrinsic detector or one of the
/// reference charts.
struct DetectorSpec {
    std::string name = "idd";  // idd | hotelling | count_chart | max_dev
    DetectorConfig idd;
    double baseline_alpha = 0.02;
    int max_dev_categories = 6;
};

struct BenchmarkConfig {
    StreamConfig stream;
    std::vector<DetectorSpec> detectors;
    std::vector<double> target_arl0 = {100.0};
    int replications = 10;
    int null_replications = 0; // extra in-control runs for matching; 0 => replications
    int n0 = 50;               // calibration length per replication
    int kappa = 20;            // change position within the monitoring phase
    int monitor_horizon = 0;   // 0 => 10 x max target
    int change_horizon = 0;    // 0 => min(monitor_horizon, kappa + 300)
    std::uint64_t seed = 1;
    int threads = 0;           // 0 => hardware concurrency
    int bisection_steps = 40;
    double match_tol = 0.05;

    void validate() const;
};

/// One (detector, target ARL0) result.
struct BenchmarkCell {
    std::string detector;
    double target_arl0 = 0.0;
    bool matched = false;      // bisection hit the target within match_tol
    double scale = 1.0;        // threshold multiplier found
    double arl0 = 0.0;
    double arl0_se = 0.0;
    int censored_null = 0;
    double arl1 = 0.0;         // mean delay tau - kappa given tau > kappa
    double arl1_se = 0.0;
    int censored_change = 0;
    double detection_rate = 0.0;   // among runs surviving past kappa
    double false_alarm_rate = 0.0; // runs alarming at or before kappa
    double seconds = 0.0;
};

struct BenchmarkReport {
    int schema_version = 1;
    BenchmarkConfig config;
    std::vector<BenchmarkCell> cells;
    bool all_matched = true;
};

/// Run every (detector, target) cell: per-replication statistic trajectories
/// are computed once and reused across bisection steps; replications run on a
/// small work pool and aggregation is order-independent.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

void write_report_json(const std::string& path, const BenchmarkReport& report);
void write_report_csv(const std::string& path, const BenchmarkReport& report);

}  // namespace idd::harness
