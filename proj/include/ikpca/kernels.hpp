#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ikpca/types.hpp"

namespace ikpca {

enum class KernelFamily { Rbf };

// k(x, y) = exp(-|x - y|^2 / sigma).  sigma is the positive bandwidth
// denominator applied to the squared Euclidean distance.
template <class Scalar>
struct KernelConfig {
  KernelFamily family = KernelFamily::Rbf;
  Scalar sigma = Scalar(1);
};

template <class Scalar>
Scalar kernel_eval(const KernelConfig<Scalar>& cfg, const Vector<Scalar>& x,
                   const Vector<Scalar>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (!(cfg.sigma > Scalar(0)))
    throw std::invalid_argument("kernel_eval: bandwidth must be positive");
  return std::exp(-(x - y).squaredNorm() / cfg.sigma);
}

// Column vector of kernel values of every retained point against x_new.
template <class Scalar>
Vector<Scalar> kernel_vector(const KernelConfig<Scalar>& cfg,
                             const std::vector<Vector<Scalar>>& points,
                             const Vector<Scalar>& x_new) {
  if (points.empty())
    throw std::invalid_argument("kernel_vector: empty point set");
  Vector<Scalar> a(static_cast<Index>(points.size()));
  for (Index i = 0; i < a.size(); ++i)
    a[i] = kernel_eval(cfg, points[static_cast<std::size_t>(i)], x_new);
  return a;
}

template <class Scalar>
Matrix<Scalar> kernel_matrix(const KernelConfig<Scalar>& cfg,
                             const std::vector<Vector<Scalar>>& points) {
  if (points.empty())
    throw std::invalid_argument("kernel_matrix: empty point set");
  const Index n = static_cast<Index>(points.size());
  Matrix<Scalar> K(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = kernel_eval(cfg, points[static_cast<std::size_t>(i)],
                          points[static_cast<std::size_t>(i)]);
    for (Index j = i + 1; j < n; ++j) {
      const Scalar v = kernel_eval(cfg, points[static_cast<std::size_t>(i)],
                                   points[static_cast<std::size_t>(j)]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

// Median of the Euclidean (unsquared) distances over all unordered pairs in
// the sample; an even pair count takes the mean of the two middle values.
// The result is the usual heuristic choice for the RBF bandwidth.
template <class Scalar>
Scalar median_bandwidth(const std::vector<Vector<Scalar>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument(
        "median_bandwidth: need at least two sample points");
  std::vector<Scalar> dists;
  dists.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != points[0].size())
      throw std::invalid_argument("median_bandwidth: dimension mismatch");
    for (std::size_t j = i + 1; j < points.size(); ++j)
      dists.push_back((points[i] - points[j]).norm());
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t half = dists.size() / 2;
  Scalar med;
  if (dists.size() % 2 == 1)
    med = dists[half];
  else
    med = (dists[half - 1] + dists[half]) / Scalar(2);
  if (!(med > Scalar(0)))
    throw std::invalid_argument(
        "median_bandwidth: degenerate sample, median pairwise distance is zero");
  return med;
}

}  // namespace ikpca
