#pragma once

#include <stdexcept>
#include <string>

namespace mbpi {

// Argument outside the documented domain of an operation (|z| > 1, nu not in
// (0,1), y outside (0,1], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model-level precondition failed, e.g. gamma = 0 or C_L != |gamma| for a
// transient-regime computation.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Integration, quadrature or inversion did not reach the requested accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or law text.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbpi
