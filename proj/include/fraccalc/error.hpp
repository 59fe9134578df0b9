#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fraccalc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Gamma evaluated at (or within machine tolerance of) 0, -1, -2, ...
class NonPositiveIntegerPole : public DomainError {
public:
    using DomainError::DomainError;
};

/// The problem is well posed, but the requested model/method combination is not offered
/// (e.g. an explicit start for a Riemann-Liouville problem).
class ModelRestriction : public Error {
public:
    using Error::Error;
};

/// Base for failures of an otherwise valid numerical computation.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class EvaluationRegionExceeded : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class NonConvergence : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class EigenConvergenceFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class InconsistentArcLength : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Carries the time-step index at which a stepping scheme failed.
class StepFailure : public NumericalFailure {
public:
    StepFailure(const std::string& what, std::size_t step)
        : NumericalFailure(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class RhsEvaluationError : public StepFailure {
public:
    using StepFailure::StepFailure;
};

class NonlinearSolveFailure : public StepFailure {
public:
    using StepFailure::StepFailure;
};

}  // namespace fraccalc
