#pragma once

#include <stdexcept>
#include <string>

namespace suptail {

// Base class for every failure the library raises, so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define SUPTAIL_ERROR_KIND(Name)                                  \
    struct Name : Error {                                         \
        explicit Name(const std::string& msg) : Error(msg) {}     \
        const char* kind() const noexcept override { return #Name; } \
    }

// Bad user input: malformed config, parameter outside its documented domain.
SUPTAIL_ERROR_KIND(ConfigError);
SUPTAIL_ERROR_KIND(DomainError);

// A requested moment does not exist for the given distribution parameters.
SUPTAIL_ERROR_KIND(InfiniteMoment);

// Adaptive integration could not reach the requested tolerance.
SUPTAIL_ERROR_KIND(QuadratureFailure);

// Newton/bisection did not converge or left its residual above tolerance.
SUPTAIL_ERROR_KIND(SolverFailure);

// The truncated MGF never crosses 1 (mis-specified model, e.g. zero tail mass at y).
SUPTAIL_ERROR_KIND(NoPositiveRoot);

// A bound was requested below its certification threshold (y <= y_beta or y <= y_eta*).
SUPTAIL_ERROR_KIND(ThresholdViolation);

// Re-insurance retention with 1/a integral: the constant-C representation degenerates.
SUPTAIL_ERROR_KIND(DegenerateRetention);

// A Monte Carlo estimate is too noisy for the requested diagnostic.
SUPTAIL_ERROR_KIND(InsufficientSignal);

// A simulated path exceeded the configured step cap.
SUPTAIL_ERROR_KIND(BudgetExceeded);

#undef SUPTAIL_ERROR_KIND

// Raised when a stated hypothesis fails; carries the name of the failing clause.
struct HypothesisViolation : Error {
    std::string clause;
    HypothesisViolation(std::string clause_, const std::string& msg)
        : Error(msg), clause(std::move(clause_)) {}
    const char* kind() const noexcept override { return "HypothesisViolation"; }
};

}  // namespace suptail
