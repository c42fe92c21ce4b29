#pragma once

#include <stdexcept>
#include <string>

namespace slicesim {

/// Invalid scenario, cell or application parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A per-TTI audit check failed; the message carries the diagnostic trace.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace slicesim
