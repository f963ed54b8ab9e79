#pragma once

#include <stdexcept>
#include <string>

namespace tangent {

// Error taxonomy. The CLI maps each class to a distinct exit code:
// config 2, data 3, fingerprint 4, numerical 5 (anything else 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatches; a ConfigError so it shares the config exit code.
struct DimensionError : ConfigError {
  using ConfigError::ConfigError;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FingerprintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contract violations of stateful APIs (e.g. backward without a forward trace).
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tangent
