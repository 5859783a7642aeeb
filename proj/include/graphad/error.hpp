#pragma once

#include <stdexcept>
#include <string>

namespace graphad {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or missing input files, dangling indices, protocol violations.
struct DataError : Error {
  using Error::Error;
};

// Incompatible shapes or argument domains.
struct ShapeError : Error {
  using Error::Error;
};

// Operation invoked in a state that does not admit it (e.g. scoring an
// OCGIN model whose center was never initialized).
struct StateError : Error {
  using Error::Error;
};

// Bad run configuration (unknown method, missing dataset entry, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Non-finite loss or other numerical breakdown during training.
struct NumericError : Error {
  using Error::Error;
};

// Metric undefined on the given inputs (e.g. single-class AUC).
struct MetricError : Error {
  using Error::Error;
};

}  // namespace graphad
