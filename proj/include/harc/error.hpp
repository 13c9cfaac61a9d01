#pragma once

#include <stdexcept>
#include <string>

namespace harc {

// Error taxonomy mirrors the CLI exit codes:
//   2 usage, 3 data/validation, 4 numeric failure, 5 I/O.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

struct UsageError : Error {
  using Error::Error;
  int exit_code() const override { return 2; }
};

struct ValidationError : Error {
  using Error::Error;
  int exit_code() const override { return 3; }
};

/// Malformed input data (bad line, bad field); carries the same exit code as
/// other data errors.
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

struct LookupError : ValidationError {
  using ValidationError::ValidationError;
};

struct NumericError : Error {
  using Error::Error;
  int exit_code() const override { return 4; }
};

struct IoError : Error {
  using Error::Error;
  int exit_code() const override { return 5; }
};

struct CorruptionError : IoError {
  using IoError::IoError;
};

}  // namespace harc
