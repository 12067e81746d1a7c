#pragma once

#include <stdexcept>
#include <string>

namespace vcad {

/// Input failed schema or invariant checks (CLI exit code 1).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration cannot be satisfied by the supplied data (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model estimation is impossible on the given window.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vcad
