#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An EnsembleSpec (or experiment configuration) that cannot be realized.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition (e.g. non-Hermitian input).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Too few samples to form the requested estimator.
class InsufficientStatistics : public Error {
 public:
  using Error::Error;
};

/// Numerical quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit the logarithmic pole of the mean-field action.
class PoleError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmt
