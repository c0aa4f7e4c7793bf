#pragma once

#include <stdexcept>
#include <string>

namespace obsent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented invariant (Hermiticity, completeness, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Requested work exceeds a capacity envelope.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, double estimated_cost)
      : Error(what), estimated_cost_(estimated_cost) {}
  double estimated_cost() const noexcept { return estimated_cost_; }

 private:
  double estimated_cost_;
};

/// A documented precondition of the call is not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Outcome index outside the enumerated outcome space.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// The measurement does not saturate S_C = S_vN for the supplied data.
class SaturationError : public Error {
 public:
  using Error::Error;
};

/// Reconstructed state does not reproduce the supplied probabilities.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace obsent
