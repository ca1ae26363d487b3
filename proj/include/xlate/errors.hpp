// Exception types. Data-level outcomes (validation violations, rejected
// plans, unclassified traces) are values, not exceptions.
#pragma once

#include <stdexcept>
#include <string>

namespace xlate {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration: contradictory flags, missing credential, no combinations.
struct ConfigError : Error {
  using Error::Error;
};

// Host problem (missing toolchain, spawn failure). Aborts the run; never a verdict.
struct EnvironmentError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Provider failure after the retry budget is exhausted.
struct GatewayError : Error {
  using Error::Error;
};

struct NotFoundError : Error {
  using Error::Error;
};

// Metric called on an empty or all-zero input.
struct UndefinedInputError : Error {
  using Error::Error;
};

// Mismatched tally sets fed to a paired metric.
struct InputShapeError : Error {
  using Error::Error;
};

// Model output reduced to nothing after code extraction.
struct EmptyOutputError : Error {
  using Error::Error;
};

}  // namespace xlate
