#pragma once

#include <stdexcept>
#include <string>

namespace idd {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched dimensions, lengths, or shapes between operands.
struct DimensionError : Error {
    using Error::Error;
};

/// Invalid measure construction (non-finite points, bad weights).
struct MeasureError : Error {
    using Error::Error;
};

/// Iterative solver failed to reach the requested tolerance.
struct ConvergenceError : Error {
    double violation;
    ConvergenceError(const std::string& msg, double v) : Error(msg), violation(v) {}
};

/// Exhaustive oracle invoked on an instance too large to enumerate.
struct OracleSizeError : Error {
    using Error::Error;
};

/// A coupling row carries no mass, so its conditional mean is undefined.
struct DegenerateRowError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

struct InsufficientSamplesError : Error {
    using Error::Error;
};

/// All centered fields vanish; no principal directions exist.
struct DegenerateVarianceError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace idd
