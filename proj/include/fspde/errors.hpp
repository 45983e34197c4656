#pragma once

#include <stdexcept>
#include <string>

namespace fspde {

// Configuration / input validation problems. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values produced during a simulation. CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A series or quadrature failed to reach the requested tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Spatial grid too narrow or too coarse for the requested kernel.
struct GridError : std::runtime_error {
    explicit GridError(const std::string& msg) : std::runtime_error(msg) {}
};

// An envelope was requested outside its validity region; the bound makes no
// claim there, so evaluators refuse rather than extrapolate.
struct BoundNotAsserted : std::domain_error {
    explicit BoundNotAsserted(const std::string& msg) : std::domain_error(msg) {}
};

}  // namespace fspde
