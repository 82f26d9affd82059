#pragma once

#include <stdexcept>
#include <string>

namespace exokit {

/// Malformed input data: bad files, schema violations, non-finite samples.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or specification values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: rank deficiency, unachievable targets, poor conditioning.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation invoked in the wrong state (e.g. controller not calibrated).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace exokit
