#pragma once

#include <stdexcept>
#include <string>

namespace dcw {

/// Invalid or inconsistent run configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical scheme refused to proceed or produced an invalid state
/// (CFL violation, mass drift, step-size underflow, ...). CLI exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative search did not converge within its configured bounds
/// (no section crossing, bracket expansion exhausted, ...). CLI exit code 4.
class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dcw
