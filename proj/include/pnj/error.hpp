#pragma once

#include <stdexcept>
#include <string>

namespace pnj {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing parameters (bad spec values, malformed config).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A query point outside the meshed square.
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

/// Factorization or solve failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or overflowing numerical values.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnj
