#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "idd/empirical_measure.hpp"
#include "idd/synthgen.hpp"

namespace idd::harness {

/// Harness-level stream family: any synthgen scenario, plus the plain
/// Gaussian mean-shift family used for the translation benchmarks.
struct StreamConfig {
    std::string kind = "barycenter";  // scenario name or "gaussian_translation"
    synth::StreamSpec spec;           // d, batch size, seeds, scenario knobs
    double gauss_sigma = 0.5;
    double gauss_delta = 0.5;  // post-change shift applied to coordinate 1
};

/// One replication's data: a calibration segment and a lazily evaluated
/// monitoring stream drawn from the same underlying process. For the
/// deformation scenarios the fixed base sample is shared between the two
/// phases, exactly as in a single long stream.
struct ReplicationStream {
    std::vector<Eigen::MatrixXd> calibration_raw;  // duplicates kept
    std::vector<EmpiricalMeasure> calibration;
    /// Monitoring batch at t = 1, 2, ... as a raw point matrix.
    std::function<Eigen::MatrixXd(int)> monitor_raw;
    /// Same batches wrapped as measures.
    std::function<EmpiricalMeasure(int)> monitor;
};

/// Build one replication.
///   n0              calibration length
///   horizon         monitoring stream length
///   kappa           change position within monitoring; 0 means an
///                   in-control stream with no change anywhere
ReplicationStream make_replication(const StreamConfig& config, int n0, int horizon, int kappa,
                                   std::uint64_t seed);

/// Whole stream as raw batches (for `simulate` and stream files).
std::vector<Eigen::MatrixXd> make_raw_stream(const StreamConfig& config, std::uint64_t seed);

bool is_gaussian_kind(const std::string& kind);

}  // namespace idd::harness
