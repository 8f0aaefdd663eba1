#pragma once

#include <string>

#include "idd/benchmark.hpp"

namespace idd::harness {

/// Parsed contents of one config file: stream family, detector settings,
/// and benchmark protocol. Detector entries in `benchmark.detectors` carry
/// the same detector settings.
struct FileConfig {
    StreamConfig stream;
    DetectorConfig detector;
    BenchmarkConfig benchmark;
};

/// Parse a config file. Unknown keys are errors; every field is optional and
/// falls back to its documented default.
FileConfig parse_config_file(const std::string& path);
FileConfig parse_config_text(const std::string& text);

/// The documented schema, printable via the CLI.
std::string config_schema();

}  // namespace idd::harness
