#pragma once

#include <cmath>
#include <stdexcept>

#include "ikpca/batch_reference.hpp"
#include "ikpca/ikpca.hpp"
#include "ikpca/nystrom.hpp"
#include "ikpca/types.hpp"

namespace ikpca {

// Frobenius, spectral, and trace norms of a symmetric matrix; for symmetric
// input the latter two are the extreme and summed absolute eigenvalues.
template <class Scalar>
struct NormTriple {
  Scalar frobenius = Scalar(0);
  Scalar spectral = Scalar(0);
  Scalar trace = Scalar(0);
};

template <class Scalar>
NormTriple<Scalar> norm_triple(const Matrix<Scalar>& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("norm_triple: matrix must be square");
  // Symmetrize away rounding asymmetry before the eigensolve.
  const Matrix<Scalar> S = (A + A.transpose()) / Scalar(2);
  NormTriple<Scalar> out;
  out.frobenius = S.norm();
  if (S.rows() == 0) return out;
  const EigenDecomposition<Scalar> eig = batch_eig(S);
  out.spectral = eig.values.cwiseAbs().maxCoeff();
  out.trace = eig.values.cwiseAbs().sum();
  return out;
}

// Drift of a streaming state: norms of (batch kernel matrix of the accepted
// points, centered per the state's mode) minus the tracked reconstruction.
template <class Scalar>
NormTriple<Scalar> drift_report(const IkpcaState<Scalar>& state,
                                const KernelConfig<Scalar>& cfg) {
  Matrix<Scalar> batch = kernel_matrix(cfg, state.points);
  if (state.mode == CenteringMode::Centered)
    batch = center_kernel_matrix(batch);
  return norm_triple<Scalar>(batch - reconstruct(state));
}

// Norms of (full kernel matrix minus the landmark approximation).
template <class Scalar>
NormTriple<Scalar> nystrom_error(const NystromState<Scalar>& state,
                                 const Matrix<Scalar>& K_full) {
  if (K_full.rows() != state.n() || K_full.cols() != state.n())
    throw std::invalid_argument("nystrom_error: dimension mismatch");
  return norm_triple<Scalar>(K_full - approx_kernel(state));
}

}  // namespace ikpca
