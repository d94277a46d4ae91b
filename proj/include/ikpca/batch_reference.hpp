#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Jacobi>

#include "ikpca/errors.hpp"
#include "ikpca/kernels.hpp"
#include "ikpca/types.hpp"

namespace ikpca {

// Relative eigenvalue cutoff under which a kernel block is treated as rank
// deficient when it has to be inverted.
inline constexpr double kPseudoInverseThresholdRel = 1e-10;

// Dense symmetric eigensolver used as the ground truth everywhere: cyclic
// Jacobi sweeps until the off-diagonal mass drops below 1e-13 * |A|_F.
// Deliberately self-contained and simple rather than fast.
template <class Scalar>
EigenDecomposition<Scalar> batch_eig(const Matrix<Scalar>& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("batch_eig: matrix must be square");
  const Index n = A.rows();
  EigenDecomposition<Scalar> out;
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  const Scalar frob = A.norm();
  if ((A - A.transpose()).norm() > Scalar(1e-9) * std::max(frob, Scalar(1)))
    throw std::invalid_argument("batch_eig: matrix is not symmetric");

  Matrix<Scalar> B = (A + A.transpose()) / Scalar(2);
  Matrix<Scalar> U = Matrix<Scalar>::Identity(n, n);
  const Scalar stop = Scalar(1e-13) * frob;

  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    Scalar off = Scalar(0);
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += B(p, q) * B(p, q);
    off = std::sqrt(Scalar(2) * off);
    if (off <= stop) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (B(p, q) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(B, p, q);
        B.applyOnTheLeft(p, q, rot.adjoint());
        B.applyOnTheRight(p, q, rot);
        U.applyOnTheRight(p, q, rot);
      }
    }
  }
  if (sweep == max_sweeps)
    throw NumericalError("batch_eig: Jacobi iteration did not converge");

  // Sort ascending and fix the sign of each eigenvector so its
  // largest-magnitude component is positive.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return B(a, a) < B(b, b); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = B(src, src);
    Vector<Scalar> col = U.col(src);
    Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col[imax] < Scalar(0)) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

// Double centering: K' = K - M*K - K*M + M*K*M with M the matrix whose every
// entry is 1/n.  The result annihilates the all-ones vector.
template <class Scalar>
Matrix<Scalar> center_kernel_matrix(const Matrix<Scalar>& K) {
  if (K.rows() != K.cols())
    throw std::invalid_argument("center_kernel_matrix: matrix must be square");
  const Index n = K.rows();
  if (n == 0) return K;
  const Vector<Scalar> row_mean = K.rowwise().mean();
  const Vector<Scalar> col_mean = K.colwise().mean().transpose();
  const Scalar total_mean = K.mean();
  Matrix<Scalar> Kc = K;
  Kc.colwise() -= row_mean;
  Kc.rowwise() -= col_mean.transpose();
  Kc.array() += total_mean;
  return Kc;
}

template <class Scalar>
Matrix<Scalar> batch_centered_kernel(const KernelConfig<Scalar>& cfg,
                                     const std::vector<Vector<Scalar>>& points) {
  return center_kernel_matrix(kernel_matrix(cfg, points));
}

namespace detail {

// Thresholded pseudo-inverse built from an eigendecomposition; eigenpairs
// with value <= rel * max value are dropped.
template <class Scalar>
Matrix<Scalar> spectral_pseudo_inverse(const EigenDecomposition<Scalar>& eig,
                                       Scalar rel) {
  const Scalar lam_max = eig.values.maxCoeff();
  if (!(lam_max > Scalar(0)))
    throw NumericalError(
        "spectral_pseudo_inverse: block has no positive eigenvalues");
  const Scalar thr = rel * lam_max;
  const Index n = eig.size();
  Matrix<Scalar> P = Matrix<Scalar>::Zero(n, n);
  bool kept = false;
  for (Index i = 0; i < n; ++i) {
    if (eig.values[i] > thr) {
      P.noalias() +=
          (eig.vectors.col(i) * eig.vectors.col(i).transpose()) / eig.values[i];
      kept = true;
    }
  }
  if (!kept)
    throw NumericalError(
        "spectral_pseudo_inverse: all eigenvalues below threshold");
  return P;
}

}  // namespace detail

// Low-rank approximation K_nm * pinv(K_mm) * K_mn from a landmark subset,
// formed from scratch.  The inverse goes through batch_eig with small
// eigenvalues dropped.
template <class Scalar>
Matrix<Scalar> batch_nystrom(const KernelConfig<Scalar>& cfg,
                             const std::vector<Vector<Scalar>>& points,
                             const std::vector<Index>& landmark_indices) {
  if (points.empty())
    throw std::invalid_argument("batch_nystrom: empty point set");
  if (landmark_indices.empty())
    throw std::invalid_argument("batch_nystrom: empty landmark set");
  const Index n = static_cast<Index>(points.size());
  const Index m = static_cast<Index>(landmark_indices.size());
  std::vector<Vector<Scalar>> landmarks;
  landmarks.reserve(landmark_indices.size());
  for (std::size_t j = 0; j < landmark_indices.size(); ++j) {
    const Index idx = landmark_indices[j];
    if (idx < 0 || idx >= n)
      throw std::invalid_argument("batch_nystrom: landmark index out of range");
    for (std::size_t i = 0; i < j; ++i)
      if (landmark_indices[i] == idx)
        throw std::invalid_argument("batch_nystrom: duplicate landmark index");
    landmarks.push_back(points[static_cast<std::size_t>(idx)]);
  }
  Matrix<Scalar> Knm(n, m);
  for (Index j = 0; j < m; ++j)
    Knm.col(j) =
        kernel_vector(cfg, points, landmarks[static_cast<std::size_t>(j)]);
  const Matrix<Scalar> Kmm = kernel_matrix(cfg, landmarks);
  const Matrix<Scalar> P = detail::spectral_pseudo_inverse(
      batch_eig(Kmm), Scalar(kPseudoInverseThresholdRel));
  Matrix<Scalar> approx = Knm * P * Knm.transpose();
  return (approx + approx.transpose()) / Scalar(2);
}

}  // namespace ikpca
