#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ikpca/batch_reference.hpp"
#include "ikpca/eigen_update.hpp"
#include "ikpca/errors.hpp"
#include "ikpca/kernels.hpp"
#include "ikpca/types.hpp"

namespace ikpca {

enum class CenteringMode { ZeroMean, Centered };

// Default relative pivot threshold below which an expansion counts as
// numerically rank deficient and the incoming point is excluded.
inline constexpr double kExclusionThresholdRel = 1e-12;

struct ExclusionRecord {
  long stream_index = 0;
  std::string reason;
};

// Streaming state for the incremental eigendecomposition of the kernel
// matrix (ZeroMean) or its double-centered counterpart (Centered).  The
// kernel matrix itself is never stored; kernel_sum and row_sums carry the
// running aggregates the centered update needs.
template <class Scalar>
struct IkpcaState {
  CenteringMode mode = CenteringMode::ZeroMean;
  KernelConfig<Scalar> kernel;
  EigenDecomposition<Scalar> decomp;
  std::vector<Vector<Scalar>> points;
  Scalar kernel_sum = Scalar(0);  // sum of all entries of the kernel matrix
  Vector<Scalar> row_sums;        // kernel matrix times the all-ones vector
  std::vector<ExclusionRecord> excluded;
  long update_count = 0;      // rank-one updates committed so far
  Index bootstrap_size = 0;   // points decomposed by the batch solver at init
  long next_stream_index = 0; // position of the next offered point
  Scalar exclusion_threshold_rel = Scalar(kExclusionThresholdRel);

  Index size() const { return static_cast<Index>(points.size()); }
};

template <class Scalar>
IkpcaState<Scalar> init_zero_mean(const KernelConfig<Scalar>& cfg,
                                  const Vector<Scalar>& x1) {
  IkpcaState<Scalar> state;
  state.mode = CenteringMode::ZeroMean;
  state.kernel = cfg;
  const Scalar k11 = kernel_eval(cfg, x1, x1);
  state.decomp.values = Vector<Scalar>::Constant(1, k11);
  state.decomp.vectors = Matrix<Scalar>::Identity(1, 1);
  state.points = {x1};
  state.kernel_sum = k11;
  state.row_sums = Vector<Scalar>::Constant(1, k11);
  state.bootstrap_size = 1;
  state.next_stream_index = 1;
  return state;
}

// Bootstrap from a batch: the block kernel matrix goes through the batch
// eigensolver and updates start from there.
template <class Scalar>
IkpcaState<Scalar> init_zero_mean(const KernelConfig<Scalar>& cfg,
                                  const std::vector<Vector<Scalar>>& batch) {
  if (batch.empty())
    throw std::invalid_argument("init_zero_mean: empty bootstrap batch");
  IkpcaState<Scalar> state;
  state.mode = CenteringMode::ZeroMean;
  state.kernel = cfg;
  const Matrix<Scalar> K = kernel_matrix(cfg, batch);
  state.decomp = batch_eig(K);
  state.points = batch;
  state.kernel_sum = K.sum();
  state.row_sums = K.rowwise().sum();
  state.bootstrap_size = static_cast<Index>(batch.size());
  state.next_stream_index = static_cast<long>(batch.size());
  return state;
}

template <class Scalar>
IkpcaState<Scalar> init_centered(const KernelConfig<Scalar>& cfg,
                                 const std::vector<Vector<Scalar>>& batch) {
  if (batch.size() < 2)
    throw std::invalid_argument(
        "init_centered: bootstrap batch needs at least two points");
  IkpcaState<Scalar> state;
  state.mode = CenteringMode::Centered;
  state.kernel = cfg;
  const Matrix<Scalar> K = kernel_matrix(cfg, batch);
  const Matrix<Scalar> Kc = center_kernel_matrix(K);
  if (Kc.cwiseAbs().maxCoeff() <=
      Scalar(1e-13) * std::max(Scalar(1), K.norm()))
    throw EigenvalueCollisionError(
        "init_centered: centered kernel matrix of the bootstrap batch is "
        "numerically zero; supply distinct points");
  state.decomp = batch_eig(Kc);
  state.points = batch;
  state.kernel_sum = K.sum();
  state.row_sums = K.rowwise().sum();
  state.bootstrap_size = static_cast<Index>(batch.size());
  state.next_stream_index = static_cast<long>(batch.size());
  return state;
}

// Grow the decomposition by one dimension: the new eigenvalue is pivot/4
// with the last coordinate basis vector as its eigenvector, and the result
// is reordered ascending.
template <class Scalar>
EigenDecomposition<Scalar> expand_decomposition(
    const EigenDecomposition<Scalar>& decomp, Scalar pivot) {
  if (!(pivot > Scalar(0)))
    throw std::invalid_argument("expand_decomposition: pivot must be positive");
  const Index m = decomp.size();
  const Scalar new_value = pivot / Scalar(4);
  // Insertion point that keeps the values ascending.
  Index pos = 0;
  while (pos < m && decomp.values[pos] < new_value) ++pos;
  EigenDecomposition<Scalar> out;
  out.values.resize(m + 1);
  out.vectors = Matrix<Scalar>::Zero(m + 1, m + 1);
  for (Index k = 0; k < pos; ++k) {
    out.values[k] = decomp.values[k];
    out.vectors.col(k).head(m) = decomp.vectors.col(k);
  }
  out.values[pos] = new_value;
  out.vectors(m, pos) = Scalar(1);
  for (Index k = pos; k < m; ++k) {
    out.values[k + 1] = decomp.values[k];
    out.vectors.col(k + 1).head(m) = decomp.vectors.col(k);
  }
  return out;
}

namespace detail {

template <class Scalar>
void record_exclusion(IkpcaState<Scalar>& state, long stream_index,
                      std::string reason) {
  state.excluded.push_back(ExclusionRecord{stream_index, std::move(reason)});
}

// Expansion split of the appended row/column v: the two update vectors share
// v's head while the tail entry is halved respectively quartered, and
// sigma * (tail of v2) = 1.
template <class Scalar>
struct ExpansionPieces {
  Vector<Scalar> v1;
  Vector<Scalar> v2;
  Scalar sigma = Scalar(0);
  Scalar new_eigenvalue = Scalar(0);
};

template <class Scalar>
ExpansionPieces<Scalar> make_expansion_pieces(const Vector<Scalar>& v) {
  const Index n = v.size();
  const Scalar pivot = v[n - 1];
  ExpansionPieces<Scalar> pieces;
  pieces.v1 = v;
  pieces.v1[n - 1] = pivot / Scalar(2);
  pieces.v2 = v;
  pieces.v2[n - 1] = pivot / Scalar(4);
  pieces.sigma = Scalar(4) / pivot;
  pieces.new_eigenvalue = pivot / Scalar(4);
  return pieces;
}

}  // namespace detail

// Stream one point into a zero-mean state.  The expanded matrix equals the
// blown-up block diagonal plus sigma*v1*v1^T - sigma*v2*v2^T, i.e. two
// rank-one updates.  On numerical failure the state is left untouched except
// for the exclusion log, and false is returned.
template <class Scalar>
bool add_point_zero_mean(IkpcaState<Scalar>& state, const Vector<Scalar>& x) {
  if (state.mode != CenteringMode::ZeroMean)
    throw std::invalid_argument("add_point_zero_mean: state is not zero-mean");
  const long stream_index = state.next_stream_index++;
  const Vector<Scalar> a = kernel_vector(state.kernel, state.points, x);
  const Scalar k_new = kernel_eval(state.kernel, x, x);
  const Index m = state.size();

  const Scalar eig_scale = state.decomp.values.cwiseAbs().maxCoeff();
  if (!(k_new > state.exclusion_threshold_rel * eig_scale)) {
    detail::record_exclusion(state, stream_index,
                             "self-kernel below exclusion threshold");
    return false;
  }

  Vector<Scalar> v(m + 1);
  v.head(m) = a;
  v[m] = k_new;
  const auto pieces = detail::make_expansion_pieces(v);

  EigenDecomposition<Scalar> cand;
  try {
    cand = expand_decomposition(state.decomp, k_new);
    cand = rank_one_update(cand,
                           RankOnePerturbation<Scalar>{pieces.sigma, pieces.v1});
    cand = rank_one_update(
        cand, RankOnePerturbation<Scalar>{-pieces.sigma, pieces.v2});
  } catch (const NumericalError& err) {
    detail::record_exclusion(state, stream_index, err.what());
    return false;
  }

  state.decomp = std::move(cand);
  state.points.push_back(x);
  Vector<Scalar> row_sums(m + 1);
  row_sums.head(m) = state.row_sums + a;
  row_sums[m] = a.sum() + k_new;
  state.row_sums = std::move(row_sums);
  state.kernel_sum += Scalar(2) * a.sum() + k_new;
  state.update_count += 2;
  return true;
}

// Mean-correction vector for the centered update: with S the current kernel
// sum, S2 its value after the new point, and C = -S/m^2 + S2/(m+1)^2,
//   u = row_sums/(m(m+1)) - a/(m+1) + (C/2) * ones.
// Adding ones*u^T + u*ones^T to the centered block re-centers it for m+1
// points.
template <class Scalar>
Vector<Scalar> mean_update_vector(const IkpcaState<Scalar>& state,
                                  const Vector<Scalar>& a, Scalar k_new) {
  const Index m = state.size();
  if (a.size() != m)
    throw std::invalid_argument("mean_update_vector: dimension mismatch");
  const Scalar md = Scalar(m);
  const Scalar S2 =
      state.kernel_sum + Scalar(2) * a.sum() + k_new;
  const Scalar C = -state.kernel_sum / (md * md) +
                   S2 / ((md + Scalar(1)) * (md + Scalar(1)));
  Vector<Scalar> u = state.row_sums / (md * (md + Scalar(1)));
  u -= a / (md + Scalar(1));
  u.array() += C / Scalar(2);
  return u;
}

// Stream one point into a centered state: two rank-one updates re-center the
// existing block, then the expansion adds the new row/column with two more —
// four updates per accepted point.  The pivot is the centered self-kernel
// entry; at or below the exclusion threshold the point is dropped and the
// state rolled back.
template <class Scalar>
bool add_point_centered(IkpcaState<Scalar>& state, const Vector<Scalar>& x) {
  if (state.mode != CenteringMode::Centered)
    throw std::invalid_argument("add_point_centered: state is not centered");
  const long stream_index = state.next_stream_index++;
  const Vector<Scalar> a = kernel_vector(state.kernel, state.points, x);
  const Scalar k_new = kernel_eval(state.kernel, x, x);
  const Index m = state.size();
  const Scalar md = Scalar(m);

  const Vector<Scalar> u = mean_update_vector(state, a, k_new);
  const Vector<Scalar> ones = Vector<Scalar>::Ones(m);

  EigenDecomposition<Scalar> cand;
  try {
    cand = rank_one_update(
        state.decomp, RankOnePerturbation<Scalar>{Scalar(0.5), ones + u});
    cand = rank_one_update(
        cand, RankOnePerturbation<Scalar>{Scalar(-0.5), ones - u});
  } catch (const NumericalError& err) {
    detail::record_exclusion(state, stream_index, err.what());
    return false;
  }

  // Aggregates for m+1 points; committed only on success.
  const Scalar S2 = state.kernel_sum + Scalar(2) * a.sum() + k_new;
  Vector<Scalar> row_sums(m + 1);
  row_sums.head(m) = state.row_sums + a;
  row_sums[m] = a.sum() + k_new;

  // Appended row/column of the centered matrix for m+1 points.
  Vector<Scalar> k(m + 1);
  k.head(m) = a;
  k[m] = k_new;
  const Scalar m1 = md + Scalar(1);
  Vector<Scalar> v = k;
  v.array() -= k.sum() / m1;
  v -= (row_sums.array() / m1).matrix();
  v.array() += S2 / (m1 * m1);

  const Scalar pivot = v[m];
  const Scalar eig_scale = state.decomp.values.cwiseAbs().maxCoeff();
  if (!(pivot > state.exclusion_threshold_rel * eig_scale)) {
    detail::record_exclusion(state, stream_index,
                             "centered pivot below exclusion threshold");
    return false;
  }

  const auto pieces = detail::make_expansion_pieces(v);
  try {
    cand = expand_decomposition(cand, pivot);
    cand = rank_one_update(cand,
                           RankOnePerturbation<Scalar>{pieces.sigma, pieces.v1});
    cand = rank_one_update(
        cand, RankOnePerturbation<Scalar>{-pieces.sigma, pieces.v2});
  } catch (const NumericalError& err) {
    detail::record_exclusion(state, stream_index, err.what());
    return false;
  }

  state.decomp = std::move(cand);
  state.points.push_back(x);
  state.row_sums = std::move(row_sums);
  state.kernel_sum = S2;
  state.update_count += 4;
  return true;
}

// Dispatch on the state's mode.
template <class Scalar>
bool add_point(IkpcaState<Scalar>& state, const Vector<Scalar>& x) {
  return state.mode == CenteringMode::ZeroMean ? add_point_zero_mean(state, x)
                                               : add_point_centered(state, x);
}

// Transient dense rebuild of the tracked matrix; for measurement and tests
// only, the streaming path never stores it.
template <class Scalar>
Matrix<Scalar> reconstruct(const IkpcaState<Scalar>& state) {
  return reconstruct_dense(state.decomp);
}

template <class Scalar>
Scalar orthogonality_error(const IkpcaState<Scalar>& state) {
  const Index n = state.decomp.size();
  return (state.decomp.vectors * state.decomp.vectors.transpose() -
          Matrix<Scalar>::Identity(n, n))
      .norm();
}

// Feature-space coordinates of x along the top_k largest eigenpairs:
// component r is u_r^T k_x / sqrt(lambda_r), with k_x centered consistently
// with the tracked matrix in Centered mode.  Components are ordered by
// descending eigenvalue.
template <class Scalar>
Vector<Scalar> project(const IkpcaState<Scalar>& state, const Vector<Scalar>& x,
                       Index top_k) {
  const Index m = state.size();
  if (top_k < 0 || top_k > m)
    throw std::invalid_argument("project: top_k out of range");
  Vector<Scalar> out(top_k);
  if (top_k == 0) return out;
  Vector<Scalar> kx = kernel_vector(state.kernel, state.points, x);
  if (state.mode == CenteringMode::Centered) {
    const Scalar md = Scalar(m);
    const Scalar kx_mean = kx.mean();
    kx = (kx.array() - kx_mean - state.row_sums.array() / md +
          state.kernel_sum / (md * md))
             .matrix();
  }
  for (Index r = 0; r < top_k; ++r) {
    const Index idx = m - 1 - r;  // values ascending -> take from the back
    const Scalar lambda = state.decomp.values[idx];
    if (!(lambda > Scalar(0)))
      throw std::invalid_argument(
          "project: requested component has a non-positive eigenvalue");
    out[r] = state.decomp.vectors.col(idx).dot(kx) / std::sqrt(lambda);
  }
  return out;
}

}  // namespace ikpca
