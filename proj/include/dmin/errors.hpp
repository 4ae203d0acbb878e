#pragma once

#include <stdexcept>
#include <string>

namespace dmin {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arithmetic and algebra.
struct NullDivisorError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };
struct PolarError : Error { using Error::Error; };

// Geometry and validation.
struct ValidationError : Error { using Error::Error; };
struct DegenerateMetricError : Error { using Error::Error; };
struct DegeneratePointError : Error { using Error::Error; };
struct FrameConstructionError : Error { using Error::Error; };
struct MixedTypeError : Error { using Error::Error; };

// Expressions.
struct UnsupportedExpressionError : Error { using Error::Error; };
struct ParseError : Error {
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

// Numerics.
struct InverseSolveError : Error { using Error::Error; };
struct DriftError : Error { using Error::Error; };
struct ResidualError : Error { using Error::Error; };

// Transform preconditions.
struct KindError : Error { using Error::Error; };
struct DetError : Error { using Error::Error; };
struct ParamError : Error { using Error::Error; };

}  // namespace dmin
