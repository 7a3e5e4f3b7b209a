#pragma once

#include <stdexcept>
#include <string>

namespace lpp {

/// Invalid parameters or malformed input (maps to CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Requested problem does not fit in memory or exceeds a size guard.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation not defined for this law (e.g. a rate function for a
/// sampling-only law).
struct UnsupportedOperation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a closed-form expression.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace lpp
