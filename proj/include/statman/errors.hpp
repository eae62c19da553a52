#pragma once

#include <stdexcept>
#include <string>

namespace statman {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VarianceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when checks that are mathematically equivalent reach conclusive
/// opposite verdicts, which indicates a tolerance below the noise floor or
/// an internal convention error.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse failure in the expression language or the manifold file.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t position)
        : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
          pos(position) {}
    explicit ParseError(const std::string& msg) : std::runtime_error(msg), pos(0) {}
    std::size_t pos;
};

}  // namespace statman
