#pragma once

#include <stdexcept>
#include <string>

namespace qsw {

/// Invalid parameters, grids, specs or configuration documents.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operand shapes or grids do not match.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A density fell below its floor (logarithm or recomposition undefined).
class DensityFloorError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A diagnostic was asked for something it cannot evaluate (window too short,
/// degenerate data, saturation regime).
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The advective CFL number of a step exceeds its cap.
class CflError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qsw
