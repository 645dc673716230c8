#ifndef GRIDSHAPE_ERRORS_HPP
#define GRIDSHAPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridshape {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A coefficient became non-finite (overflow or invalid input).
struct InvalidCoefficientError : Error {
    using Error::Error;
};

/// Transfer function evaluated at (or too close to) a pole.
struct PoleEvaluationError : Error {
    using Error::Error;
};

/// Operation requires a proper transfer function (or relative degree >= 1).
struct ImproperTransferError : Error {
    using Error::Error;
};

/// Feedback interconnection produced an identically zero denominator.
struct DegenerateLoopError : Error {
    using Error::Error;
};

/// A pole or eigenvalue sits on or right of the stability boundary.
struct InstabilityError : Error {
    using Error::Error;
};

/// A linear solve failed to meet its residual tolerance.
struct IllConditionedError : Error {
    using Error::Error;
};

/// Gramian numerically singular; realization is not minimal.
struct NonMinimalError : Error {
    using Error::Error;
};

/// State vector became non-finite during integration.
struct DivergenceError : Error {
    using Error::Error;
};

/// Two-area angle difference exceeded pi/2 (loss of synchronism).
struct AngleSeparationError : Error {
    using Error::Error;
};

/// Requested signal is not present in a trajectory.
struct MissingSignalError : Error {
    using Error::Error;
};

/// Trajectory tail has not settled; metrics would be unreliable.
struct HorizonError : Error {
    using Error::Error;
};

/// Deficit-only allocation cannot absorb the required totals.
struct InfeasiblePolicyError : Error {
    using Error::Error;
};

/// A domain object violates one of its invariants.
struct InvariantError : Error {
    using Error::Error;
};

/// Scenario configuration is malformed; carries field and line diagnostics.
struct ConfigError : Error {
    ConfigError(const std::string& message, std::string field_name, int line_number = 0)
        : Error(message), field(std::move(field_name)), line(line_number) {}
    std::string field;
    int line = 0;
};

} // namespace gridshape

#endif
