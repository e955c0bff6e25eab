#pragma once

#include <stdexcept>
#include <string>

namespace chemo {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// A field holds a NaN or Inf where a finite value is required.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a functional (negative base, zero divisor).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Elliptic iteration did not reach its tolerance.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Failure modes of a time step. Each maps to one run trigger.
enum class StepFailure { TimestepCollapse, Degeneracy, Overflow };

class StepError : public Error {
public:
    StepError(StepFailure kind, const std::string& what) : Error(what), kind_(kind) {}
    StepFailure kind() const noexcept { return kind_; }

private:
    StepFailure kind_;
};

class ThresholdNotMet : public Error {
public:
    using Error::Error;
};

/// No admissible exponent window was found; carries the last bounds tried.
class InfeasiblePlan : public Error {
public:
    InfeasiblePlan(const std::string& what, double p_lower, double p_upper)
        : Error(what), p_lower_(p_lower), p_upper_(p_upper) {}
    double p_lower() const noexcept { return p_lower_; }
    double p_upper() const noexcept { return p_upper_; }

private:
    double p_lower_;
    double p_upper_;
};

}  // namespace chemo
