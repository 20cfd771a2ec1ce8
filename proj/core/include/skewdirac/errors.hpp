#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace skewdirac {

/// Base of every error thrown by the library. The message is prefixed with the
/// module name and, when meaningful, names the node / cell / z index involved.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Bad user input: malformed descriptors, inconsistent sizes, non-positive knobs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical-domain failures. The CLI maps all of these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// z outside the half-plane Im z > M (+ margin), or -A22 not positive definite.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Non-finite or > 1e300 entries while propagating; carries the offending index.
class OverflowError : public NumericalError {
 public:
  OverflowError(std::string module, const std::string& what, long index)
      : NumericalError(std::move(module), what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// A documented precondition did not hold numerically (e.g. singular Mobius denominator).
class PreconditionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Cholesky breakdown of the S kernel.
class IllPosedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fourier recovery did not pass its a-halving certificate.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Null space of beta has the wrong dimension at some node.
class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Polar alignment of consecutive gamma bases degenerated.
class ContinuityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Linear-fractional denominator too ill-conditioned.
class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace skewdirac
