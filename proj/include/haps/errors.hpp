#pragma once

#include <stdexcept>
#include <string>

namespace haps {

// Bad configuration, unreadable inputs, checkpoint/config mismatch.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values in a loss or gradient.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace haps
