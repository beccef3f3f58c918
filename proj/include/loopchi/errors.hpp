#pragma once

#include <stdexcept>
#include <string>

namespace loopchi {

// Raised for malformed config text or violated model invariants.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a quadrature cannot justify its truncation.
struct NonConvergentError : std::runtime_error {
    explicit NonConvergentError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Stable CLI exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitIo = 4,
};

} // namespace loopchi
