#pragma once

#include <stdexcept>
#include <string>

namespace covsel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-finite entries, excess asymmetry, bad dimensions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The eigensolver (or another backend routine) did not converge.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// A guarantee that should hold by construction was violated.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace covsel
