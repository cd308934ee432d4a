#pragma once

#include <stdexcept>
#include <string>

namespace kamgrid {

/// Raised when an iterative method exhausts its budget. Carries the last
/// residual so callers can decide whether the best iterate is still usable.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Malformed or invalid problem configuration (bad file, failed validation).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested analytic reference does not exist for this Lagrangian family.
class UnsupportedReferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kamgrid
