#pragma once

#include <stdexcept>
#include <string>

namespace kvf {

/// Coordinate outside the domain of a chart or profile.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transition map evaluated at a point with no image in the other chart.
struct SingularPointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Chart requested is not defined for the given scale-factor profile.
struct ChartProfileMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite-difference step too large for the requested operation.
struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A singular value sits too close to the rank-decision threshold.
struct RankUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transport path left the domain of its chart.
struct ChartExitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The causal-character scan failed to locate a non-time-like point.
struct WitnessNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Causal character requested for the zero field.
struct ZeroFieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed profile spec, point spec, or configuration input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace kvf
