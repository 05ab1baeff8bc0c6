#pragma once

#include <stdexcept>
#include <string>

namespace tomolab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or bases do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix failed a Hermitian / PSD / trace / trace-preservation check.
class InvalidOperator : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the documented domain of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Every particle assigned zero likelihood to a datum. The cloud is left untouched.
class DegenerateUpdate : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue truncation left nothing with positive weight.
class DegenerateProjection : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (surfaced by the CLI as exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tomolab
