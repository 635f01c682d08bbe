#pragma once

#include <stdexcept>
#include <string>

namespace clickstat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (bad depth, negative intensity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failure reading or writing an external file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures: the inputs are valid but the requested quantity does
/// not exist or cannot be computed in double precision.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Nothing survives post-selection.
class ZeroAcceptance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Mean click number is 0 or N, so the sub-binomiality is 0/0.
class DegenerateMean : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// exp(|alpha|^2/N) is not representable.
class Overflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Classical click odds p/(1-p) are not representable.
class OddsDiverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace clickstat
