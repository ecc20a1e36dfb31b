#pragma once

#include <stdexcept>
#include <string>

namespace pathint {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidPotential : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A dense assembly or memory budget would be exceeded.
class SizeGuardExceeded : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Configuration sits on (or within the exclusion radius of) a pole or resonance.
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra failure, e.g. an eigensolver that did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive procedure ran out of budget before meeting its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace pathint
