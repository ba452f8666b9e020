#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vasculo {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (negative radius, x <= 0 for a
/// logarithmic kernel, non-finite input).
class DomainError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    OverflowError(const std::string& what, double threshold)
        : Error(what), threshold_(threshold) {}
    double threshold() const noexcept { return threshold_; }

private:
    double threshold_;
};

/// Invalid model parameters. Carries the offending field names.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> fields)
        : Error(what), fields_(std::move(fields)) {}
    const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    std::vector<std::string> fields_;
};

/// The requested construction does not exist in the parameter regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Misuse of an API (wrong breakpoint, scenario/regime mismatch).
class UsageError : public Error {
public:
    using Error::Error;
};

/// rho has no zero before the first minimum of J0.
class NoZeroError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature hit its depth limit.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}
    double best_estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// A search (residual scan, Newton iteration) found no admissible root.
/// The diagnostic payload is a JSON string so callers can print it verbatim.
class NotFound : public Error {
public:
    NotFound(const std::string& what, std::string diagnostics)
        : Error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// A converged root that violates the sign or positivity conditions.
class SpuriousRoot : public Error {
public:
    using Error::Error;
};

}  // namespace vasculo
