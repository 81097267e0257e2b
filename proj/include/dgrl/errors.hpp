#pragma once

#include <stdexcept>
#include <string>

namespace dgrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix shapes do not chain.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Hyperparameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input value outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object in the wrong state (e.g. sampling an undersized buffer).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Action rejected by an environment.
class ActionError : public Error {
 public:
  using Error::Error;
};

/// Data violates a precondition (zero-norm feature rows, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dgrl
