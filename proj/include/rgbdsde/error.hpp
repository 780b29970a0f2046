#pragma once

#include <stdexcept>
#include <string>

namespace rgbdsde {

/// Invalid user-supplied configuration (bad sizes, unknown names, violated hard assumptions).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold for its arguments.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values or a failed numerical sub-step.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rgbdsde
