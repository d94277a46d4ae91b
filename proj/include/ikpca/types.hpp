#pragma once

#include <Eigen/Core>

namespace ikpca {

using Index = Eigen::Index;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Eigenpairs of a symmetric matrix.  values is sorted ascending and column i
// of vectors is the unit eigenvector belonging to values[i].
template <class Scalar>
struct EigenDecomposition {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;

  Index size() const { return values.size(); }
};

// Dense matrix represented by the decomposition, U * diag(values) * U^T.
template <class Scalar>
Matrix<Scalar> reconstruct_dense(const EigenDecomposition<Scalar>& d) {
  return d.vectors * d.values.asDiagonal() * d.vectors.transpose();
}

}  // namespace ikpca
