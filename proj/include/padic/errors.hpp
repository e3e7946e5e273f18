#pragma once

#include <stdexcept>
#include <string>

namespace padic {

// Argument outside the mathematical domain of an operation (poles, alpha <= 1
// for the Green kernel, beta = alpha in the radial power rule, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Function not representable at the requested grid resolution or support.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (e.g. support overlapping B_N).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed configuration file or CLI input.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Grid or enumeration too large for the configured cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Nonlinear solver failed to reach tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

} // namespace padic
