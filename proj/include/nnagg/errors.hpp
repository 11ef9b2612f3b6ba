#pragma once

#include <stdexcept>
#include <string>

namespace nnagg {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Batch/vector dimensions do not line up.
struct ShapeError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

// Malformed input file; message carries file/row context.
struct ParseError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

// Networks with mismatched specs fed to an aggregation step.
struct ArchitectureError : Error {
  using Error::Error;
};

// Operation requires a different task kind (regression vs classification).
struct TaskKindError : Error {
  using Error::Error;
};

// Metric undefined on the given input (e.g. ROC on single-class targets).
struct MetricError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace nnagg
