#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ikpca/batch_reference.hpp"
#include "ikpca/errors.hpp"
#include "ikpca/ikpca.hpp"
#include "ikpca/kernels.hpp"
#include "ikpca/types.hpp"

namespace ikpca {

// Landmark subset state for the incrementally grown low-rank kernel
// approximation.  The landmark block eigendecomposition lives in a zero-mean
// streaming state; cross_kernel holds the n-by-m kernel matrix of the whole
// dataset against the landmarks, one appended column per landmark.
template <class Scalar>
struct NystromState {
  std::vector<Vector<Scalar>> dataset;
  std::vector<Index> landmark_indices;
  Matrix<Scalar> cross_kernel;
  IkpcaState<Scalar> block_state;

  Index n() const { return static_cast<Index>(dataset.size()); }
  Index m() const { return static_cast<Index>(landmark_indices.size()); }
};

// Approximate eigensystem of the full kernel matrix obtained by rescaling
// the landmark block's eigenpairs.
template <class Scalar>
struct NystromEigen {
  Vector<Scalar> values;   // (n/m) * block values, ascending
  Matrix<Scalar> vectors;  // sqrt(m/n) * cross_kernel * U * inv(Lambda)
};

namespace detail {

template <class Scalar>
void check_landmark_index(const NystromState<Scalar>& state, Index idx) {
  if (idx < 0 || idx >= state.n())
    throw std::invalid_argument("nystrom: landmark index out of range");
  for (Index existing : state.landmark_indices)
    if (existing == idx)
      throw std::invalid_argument("nystrom: duplicate landmark index");
}

}  // namespace detail

template <class Scalar>
NystromState<Scalar> nystrom_init(const KernelConfig<Scalar>& cfg,
                                  const std::vector<Vector<Scalar>>& dataset,
                                  Index first_index) {
  if (dataset.empty())
    throw std::invalid_argument("nystrom_init: empty dataset");
  NystromState<Scalar> state;
  state.dataset = dataset;
  detail::check_landmark_index(state, first_index);
  const Vector<Scalar>& landmark =
      state.dataset[static_cast<std::size_t>(first_index)];
  state.block_state = init_zero_mean(cfg, landmark);
  state.landmark_indices.push_back(first_index);
  state.cross_kernel.resize(state.n(), 1);
  state.cross_kernel.col(0) = kernel_vector(cfg, state.dataset, landmark);
  return state;
}

// Seed with a batch of landmarks at once; the block goes through the batch
// eigensolver before incremental growth takes over.
template <class Scalar>
NystromState<Scalar> nystrom_init(const KernelConfig<Scalar>& cfg,
                                  const std::vector<Vector<Scalar>>& dataset,
                                  const std::vector<Index>& first_indices) {
  if (dataset.empty())
    throw std::invalid_argument("nystrom_init: empty dataset");
  if (first_indices.empty())
    throw std::invalid_argument("nystrom_init: empty landmark seed");
  NystromState<Scalar> state;
  state.dataset = dataset;
  std::vector<Vector<Scalar>> landmarks;
  landmarks.reserve(first_indices.size());
  for (Index idx : first_indices) {
    detail::check_landmark_index(state, idx);
    state.landmark_indices.push_back(idx);
    landmarks.push_back(state.dataset[static_cast<std::size_t>(idx)]);
  }
  state.block_state = init_zero_mean(cfg, landmarks);
  state.cross_kernel.resize(state.n(), state.m());
  for (Index j = 0; j < state.m(); ++j)
    state.cross_kernel.col(j) = kernel_vector(
        cfg, state.dataset, landmarks[static_cast<std::size_t>(j)]);
  return state;
}

// Add one landmark: the block state advances by a zero-mean streaming step
// and the cross matrix gains the landmark's kernel column.  If the block
// update excludes the point nothing else changes and false is returned.
template <class Scalar>
bool add_landmark(NystromState<Scalar>& state, Index idx) {
  detail::check_landmark_index(state, idx);
  const Vector<Scalar>& landmark = state.dataset[static_cast<std::size_t>(idx)];
  if (!add_point_zero_mean(state.block_state, landmark)) return false;
  state.landmark_indices.push_back(idx);
  state.cross_kernel.conservativeResize(Eigen::NoChange, state.m());
  state.cross_kernel.col(state.m() - 1) =
      kernel_vector(state.block_state.kernel, state.dataset, landmark);
  return true;
}

// Rescale the block eigenpairs to approximate the full matrix's: values by
// n/m, vectors by sqrt(m/n) * cross_kernel * U * inv(Lambda).  Block
// eigenvalues at or below the pseudo-inverse threshold are dropped together
// with their vectors.
template <class Scalar>
NystromEigen<Scalar> rescale(const NystromState<Scalar>& state) {
  const EigenDecomposition<Scalar>& block = state.block_state.decomp;
  const Scalar lam_max = block.values.maxCoeff();
  if (!(lam_max > Scalar(0)))
    throw NumericalError("rescale: landmark block has no positive eigenvalues");
  const Scalar thr = Scalar(kPseudoInverseThresholdRel) * lam_max;
  std::vector<Index> keep;
  for (Index i = 0; i < block.size(); ++i)
    if (block.values[i] > thr) keep.push_back(i);
  if (keep.empty())
    throw NumericalError("rescale: all block eigenvalues below threshold");

  const Scalar nd = Scalar(state.n());
  const Scalar md = Scalar(state.m());
  const Index kept = static_cast<Index>(keep.size());
  NystromEigen<Scalar> out;
  out.values.resize(kept);
  Matrix<Scalar> scaled(state.m(), kept);
  for (Index j = 0; j < kept; ++j) {
    const Index src = keep[static_cast<std::size_t>(j)];
    out.values[j] = (nd / md) * block.values[src];
    scaled.col(j) = block.vectors.col(src) / block.values[src];
  }
  out.vectors = std::sqrt(md / nd) * (state.cross_kernel * scaled);
  return out;
}

// Dense low-rank approximation; the n/m and m/n factors cancel so this
// equals cross * pinv(block) * cross^T.  Materialized for evaluation only.
template <class Scalar>
Matrix<Scalar> approx_kernel(const NystromState<Scalar>& state) {
  const NystromEigen<Scalar> eig = rescale(state);
  Matrix<Scalar> approx =
      eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
  return (approx + approx.transpose()) / Scalar(2);
}

}  // namespace ikpca
