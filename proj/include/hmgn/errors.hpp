#pragma once

#include <stdexcept>
#include <string>

namespace hmgn {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on sizes, indices or values was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The weighted design matrix of a least-squares problem is rank deficient.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// No rotation of the Fourier grid keeps the circulant spectrum away from zero,
/// or the assembled basis is not real.
class SpectrumDegenerate : public Error {
 public:
  using Error::Error;
};

/// A banded Cholesky factorization met a non-positive pivot.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// The requested algorithm cannot work with the given weight representation.
class UnsupportedWeights : public Error {
 public:
  using Error::Error;
};

}  // namespace hmgn
