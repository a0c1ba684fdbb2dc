#ifndef EPIDDE_ERRORS_HPP
#define EPIDDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epidde {

// Bad user input: rejected parameters, malformed config, impossible grids.
// Maps to process exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown at runtime: divergent integration, failed root search.
// Maps to process exit code 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Integration produced a non-finite state; carries the first failing time.
struct IntegrationError : NumericalError {
    IntegrationError(const std::string& what, double t)
        : NumericalError(what), time(t) {}
    double time;
};

}  // namespace epidde

#endif
