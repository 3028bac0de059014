#pragma once

#include <stdexcept>
#include <string>

namespace symtangle {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands live on incompatible spaces (or a matrix has the wrong shape).
struct DimensionMismatch : Error {
  using Error::Error;
};

// An operation requiring a Hermitian input received a non-Hermitian one.
struct NotHermitian : Error {
  using Error::Error;
};

// A matrix fails the density-matrix contract (trace one, PSD within tolerance).
struct NotAState : Error {
  using Error::Error;
};

// A scalar argument is outside its mathematical domain.
struct DomainError : Error {
  using Error::Error;
};

// Curve abscissae are not strictly increasing.
struct UnsortedGrid : Error {
  using Error::Error;
};

// The requested combination (family, operation) is not implemented.
struct Unsupported : Error {
  using Error::Error;
};

// The requested point lies in a parameter region with no implemented formula.
struct UnsupportedRegion : Error {
  using Error::Error;
};

// Requested invariant coordinates lie outside the state space.
struct OutsideStateSpace : Error {
  using Error::Error;
};

// A constrained optimization has an empty feasible set.
struct Infeasible : Error {
  using Error::Error;
};

// Two symmetry-reduced states belong to different groups.
struct GroupMismatch : Error {
  using Error::Error;
};

// A weight vector is not a probability distribution.
struct InvalidDistribution : Error {
  using Error::Error;
};

// The flip expectation is outside the range required by a filtering map.
struct FlipExpectationOutOfRange : Error {
  using Error::Error;
};

// The operation requires an abelian commutant.
struct NonAbelianUnsupported : Error {
  using Error::Error;
};

}  // namespace symtangle
