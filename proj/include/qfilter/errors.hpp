#pragma once

#include <stdexcept>
#include <string>

namespace qfilter {

// Raised when a state leaves the physical set (non-Hermitian, negative
// eigenvalue below the floor, trace collapse) or an integrator diverges.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for malformed parameters or configuration input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qfilter
