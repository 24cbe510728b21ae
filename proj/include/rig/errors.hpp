#pragma once

#include <stdexcept>
#include <string>

namespace rig {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input: problem files, coefficient strings, tolerance grammar.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Geometric preconditions violated: critical point on or too close to the
/// path, disk touching a zero of the leading coefficient, covering failure.
struct GeometryError : Error {
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

/// Iteration caps reached: root finding, branch tracking, heuristic doubling.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// The requested result cannot be produced at the working precision.
struct PrecisionError : ConvergenceError {
    explicit PrecisionError(const std::string& msg) : ConvergenceError(msg) {}
};

} // namespace rig
