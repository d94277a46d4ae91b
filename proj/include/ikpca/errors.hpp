#pragma once

#include <stdexcept>

namespace ikpca {

// Failure of a numerical routine on structurally valid input.  Misuse of an
// interface (dimension mismatches, bad flags, out-of-range indices) throws
// std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A secular-equation bracket contained no sign change, i.e. the update ran
// into numerical rank deficiency.  Streaming callers catch this to drop the
// offending point and roll back.
class RootNotFoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Two eigenvalues coincide too closely for the eigenvector update formula to
// be evaluated.
class EigenvalueCollisionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Malformed external input: dataset rows, CSV fields, state snapshots.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ikpca
