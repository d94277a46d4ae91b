#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ikpca/errors.hpp"
#include "ikpca/types.hpp"

namespace ikpca {

// Components with |z_i| <= rel * |z| are deflated: their eigenpairs pass
// through a rank-one update unchanged.
inline constexpr double kDeflationTolRel = 1e-12;
// Eigenvalues closer than rel * max|value| count as coincident; such pairs
// are rotated into a deflatable configuration before the secular solve.
inline constexpr double kSeparationFloorRel = 1e-13;
// Interlacing brackets are shrunk by rel * width at pole endpoints so the
// secular function is never evaluated exactly on a pole.
inline constexpr double kBracketMarginRel = 1e-14;
// A secular value of magnitude below this is accepted as a root outright.
inline constexpr double kSecularOmegaTol = 1e-13;
// Default relative tolerance on the bracket width for root convergence.
inline constexpr double kSecularWidthRelTol = 1e-14;

// Additive perturbation sigma * v * v^T of a symmetric matrix.
template <class Scalar>
struct RankOnePerturbation {
  Scalar sigma = Scalar(0);
  Vector<Scalar> v;
};

// z = U^T v, the perturbation vector expressed in the eigenbasis.
template <class Scalar>
Vector<Scalar> project_update(const EigenDecomposition<Scalar>& decomp,
                              const Vector<Scalar>& v) {
  if (v.size() != decomp.size())
    throw std::invalid_argument("project_update: dimension mismatch");
  return decomp.vectors.transpose() * v;
}

struct DeflationSplit {
  std::vector<Index> active;
  std::vector<Index> inert;
};

// Classify indices: i is inert iff |z_i| <= tol_rel * |z|, so an all-zero z
// makes the whole update a no-op.
template <class Scalar>
DeflationSplit deflate(const Vector<Scalar>& z, Scalar tol_rel) {
  if (!(tol_rel > Scalar(0)))
    throw std::invalid_argument("deflate: tolerance must be positive");
  const Scalar threshold = tol_rel * z.norm();
  DeflationSplit split;
  for (Index i = 0; i < z.size(); ++i) {
    if (std::abs(z[i]) > threshold)
      split.active.push_back(i);
    else
      split.inert.push_back(i);
  }
  return split;
}

// Open interval known to contain the i-th root of the secular equation
// (0-based, values ascending).  For sigma > 0 roots shift up into
// (values[i], values[i+1]) with the last capped by sigma * z^T z; for
// sigma < 0 the pattern mirrors downward.
template <class Scalar>
std::pair<Scalar, Scalar> root_bracket(Index i, const Vector<Scalar>& values,
                                       Scalar sigma, Scalar zTz) {
  const Index n = values.size();
  if (i < 0 || i >= n)
    throw std::invalid_argument("root_bracket: index out of range");
  if (sigma == Scalar(0))
    throw std::invalid_argument("root_bracket: sigma must be nonzero");
  if (sigma > Scalar(0)) {
    if (i + 1 < n) return {values[i], values[i + 1]};
    return {values[n - 1], values[n - 1] + sigma * zTz};
  }
  if (i > 0) return {values[i - 1], values[i]};
  return {values[0] + sigma * zTz, values[0]};
}

namespace detail {

// Roots of 1 + sigma * sum_i z_i^2 / (d_i - x) for fully active, strictly
// separated d, together with the differences d_i - root_r.  The deltas are
// the quantities the eigenvector formula divides by; they are computed in
// offset coordinates, never by subtracting two nearby absolute values, so
// they stay accurate when a root hugs a pole.
template <class Scalar>
struct ActiveSecularSolution {
  Vector<Scalar> roots;
  Matrix<Scalar> deltas;  // deltas(i, r) = d[i] - roots[r]
};

template <class Scalar>
void solve_one_secular_root(const Vector<Scalar>& d, const Vector<Scalar>& z,
                            Scalar sigma, Scalar zTz, Scalar tol, Index r,
                            ActiveSecularSolution<Scalar>& sol) {
  const Index p = d.size();
  const bool positive = sigma > Scalar(0);
  const auto [lo, hi] = root_bracket(r, d, sigma, zTz);
  const bool lo_pole = positive ? true : (r > 0);
  const bool hi_pole = positive ? (r + 1 < p) : true;
  const Scalar width = hi - lo;

  // The secular function is monotone between consecutive poles (increasing
  // for sigma > 0, decreasing for sigma < 0), so one midpoint probe tells
  // which endpoint the root is nearest.  That endpoint becomes the offset
  // reference: iterate on mu with root = ref + mu.
  Scalar f_mid = Scalar(1);
  {
    const Scalar half = width / Scalar(2);
    Scalar sum = Scalar(0);
    for (Index i = 0; i < p; ++i) sum += z[i] * z[i] / ((d[i] - lo) - half);
    f_mid += sigma * sum;
  }
  const bool root_in_lower = positive ? (f_mid >= Scalar(0)) : (f_mid <= Scalar(0));
  const Scalar ref = root_in_lower ? lo : hi;

  Vector<Scalar> pd(p);
  for (Index i = 0; i < p; ++i) pd[i] = d[i] - ref;
  Scalar mu_lo = root_in_lower ? Scalar(0) : -width;
  Scalar mu_hi = root_in_lower ? width : Scalar(0);

  const Scalar margin = Scalar(kBracketMarginRel) * width;
  Scalar a = mu_lo + (lo_pole ? margin : Scalar(0));
  Scalar b = mu_hi - (hi_pole ? margin : Scalar(0));

  const Scalar sgn = positive ? Scalar(1) : Scalar(-1);
  auto eval = [&](Scalar mu, Scalar* dfdmu) -> Scalar {
    Scalar sum = Scalar(0);
    Scalar dsum = Scalar(0);
    for (Index i = 0; i < p; ++i) {
      const Scalar delta = pd[i] - mu;
      const Scalar t = z[i] / delta;
      sum += z[i] * t;
      if (dfdmu) dsum += t * t;
    }
    if (dfdmu) *dfdmu = sigma * dsum;
    return Scalar(1) + sigma * sum;
  };

  auto finish = [&](Scalar mu) {
    sol.roots[r] = ref + mu;
    for (Index i = 0; i < p; ++i) sol.deltas(i, r) = pd[i] - mu;
  };

  // sgn * f is increasing, so a valid bracket has sgn*f(a) < 0 < sgn*f(b).
  // A missing sign change at the margin point next to the reference pole
  // means the root sits between that pole and the margin: halve the offset
  // toward the pole (halvings are exact, so distances all the way down to
  // denormals stay resolvable) until the sign flips, and if it never does,
  // settle for the smallest probed offset.  At the far pole a missing change
  // is rounding noise on a large |f|: accept the margin point.  At the one
  // non-pole endpoint extend outward before giving up.
  Scalar Fa = sgn * eval(a, nullptr);
  if (Fa >= Scalar(0)) {
    if (Fa == Scalar(0)) {
      finish(a);
      return;
    }
    if (lo_pole) {
      if (!root_in_lower) {
        finish(a);
        return;
      }
      b = a;
      bool bracketed = false;
      for (;;) {
        const Scalar next = a / Scalar(2);
        if (next == Scalar(0)) break;
        a = next;
        Fa = sgn * eval(a, nullptr);
        if (Fa < Scalar(0)) {
          bracketed = true;
          break;
        }
        b = a;
      }
      if (!bracketed) {
        finish(b);
        return;
      }
    } else {
      Scalar step = width;
      bool found = false;
      for (int k = 0; k < 60; ++k) {
        a -= step;
        step *= Scalar(2);
        Fa = sgn * eval(a, nullptr);
        if (Fa < Scalar(0)) {
          found = true;
          break;
        }
      }
      if (!found)
        throw RootNotFoundError("secular bracket contained no sign change");
    }
  }
  Scalar Fb = sgn * eval(b, nullptr);
  if (Fb <= Scalar(0)) {
    if (Fb == Scalar(0)) {
      finish(b);
      return;
    }
    if (hi_pole) {
      if (root_in_lower) {
        finish(b);
        return;
      }
      a = b;
      bool bracketed = false;
      for (;;) {
        const Scalar next = b / Scalar(2);
        if (next == Scalar(0)) break;
        b = next;
        Fb = sgn * eval(b, nullptr);
        if (Fb > Scalar(0)) {
          bracketed = true;
          break;
        }
        a = b;
      }
      if (!bracketed) {
        finish(a);
        return;
      }
    } else {
      Scalar step = width;
      bool found = false;
      for (int k = 0; k < 60; ++k) {
        b += step;
        step *= Scalar(2);
        Fb = sgn * eval(b, nullptr);
        if (Fb > Scalar(0)) {
          found = true;
          break;
        }
      }
      if (!found)
        throw RootNotFoundError("secular bracket contained no sign change");
    }
  }

  // Bisection-safeguarded Newton iteration on mu.
  Scalar x = a + (b - a) / Scalar(2);
  Scalar mu_root = x;
  for (int iter = 0; iter < 200; ++iter) {
    Scalar fp = Scalar(0);
    const Scalar fx = eval(x, &fp);
    mu_root = x;
    if (std::abs(fx) < Scalar(kSecularOmegaTol)) break;
    if (sgn * fx < Scalar(0))
      a = x;
    else
      b = x;
    if ((b - a) <= tol * std::max(std::abs(a), std::abs(b))) {
      mu_root = a + (b - a) / Scalar(2);
      break;
    }
    Scalar next = (fp != Scalar(0)) ? x - fx / fp : a + (b - a) / Scalar(2);
    if (!(next > a && next < b)) next = a + (b - a) / Scalar(2);
    if (next == x || next == a || next == b) {
      // No representable point left between the bounds.
      mu_root = next;
      break;
    }
    x = next;
  }
  finish(mu_root);
}

template <class Scalar>
ActiveSecularSolution<Scalar> solve_active_secular(const Vector<Scalar>& d,
                                                   const Vector<Scalar>& z,
                                                   Scalar sigma, Scalar tol) {
  const Index p = d.size();
  ActiveSecularSolution<Scalar> sol;
  sol.roots.resize(p);
  sol.deltas.resize(p, p);
  const Scalar zTz = z.squaredNorm();
  if (p == 1) {
    // A single active component shifts its eigenvalue by exactly sigma*z^2.
    sol.roots[0] = d[0] + sigma * zTz;
    sol.deltas(0, 0) = -sigma * zTz;
    return sol;
  }
  for (Index r = 0; r < p; ++r)
    solve_one_secular_root(d, z, sigma, zTz, tol, r, sol);
  return sol;
}

// Magnitudes that make the computed roots exact: the characteristic
// polynomial identity gives sigma * zhat_i^2 * prod_{j!=i} (d_j - d_i) =
// prod_j (roots_j - d_i), so
//   zhat_i^2 ~ -deltas(i,i) * prod_{j!=i} deltas(i,j) / (d_i - d_j)
// up to the common 1/sigma scale, which cancels under column normalization.
// Every factor is an O(1) interlacing ratio.  Eigenvectors built from zhat
// instead of z stay mutually orthogonal to working precision even when
// several roots crowd one pole; signs are inherited from z.
template <class Scalar>
Vector<Scalar> stabilized_weights(const Vector<Scalar>& d,
                                  const Vector<Scalar>& z,
                                  const Matrix<Scalar>& deltas) {
  const Index p = d.size();
  Vector<Scalar> zhat(p);
  for (Index i = 0; i < p; ++i) {
    Scalar prod = -deltas(i, i);
    for (Index j = 0; j < p; ++j) {
      if (j == i) continue;
      prod *= deltas(i, j) / (d[i] - d[j]);
    }
    zhat[i] = std::copysign(std::sqrt(std::abs(prod)), z[i]);
  }
  return zhat;
}

template <class Scalar>
void require_ascending(const Vector<Scalar>& values, const char* who) {
  for (Index i = 0; i + 1 < values.size(); ++i)
    if (values[i] > values[i + 1])
      throw std::invalid_argument(std::string(who) +
                                  ": eigenvalues must be ascending");
}

}  // namespace detail

// Updated eigenvalues of diag(values) + sigma * z * z^T.  Deflation happens
// internally; pass-through values are reinserted and the full result is
// returned sorted ascending.  Active eigenvalues must be separated beyond
// the coincidence floor (callers with eigenvectors at hand rotate coincident
// pairs apart first; see rank_one_update).
template <class Scalar>
Vector<Scalar> secular_roots(const Vector<Scalar>& values, Scalar sigma,
                             const Vector<Scalar>& z,
                             Scalar tol = Scalar(kSecularWidthRelTol)) {
  if (z.size() != values.size())
    throw std::invalid_argument("secular_roots: dimension mismatch");
  if (!(tol > Scalar(0)))
    throw std::invalid_argument("secular_roots: tolerance must be positive");
  detail::require_ascending(values, "secular_roots");
  if (sigma == Scalar(0) || z.isZero(Scalar(0))) return values;

  const DeflationSplit split = deflate(z, Scalar(kDeflationTolRel));
  if (split.active.empty()) return values;
  const Index p = static_cast<Index>(split.active.size());
  Vector<Scalar> d(p), zeta(p);
  for (Index r = 0; r < p; ++r) {
    d[r] = values[split.active[static_cast<std::size_t>(r)]];
    zeta[r] = z[split.active[static_cast<std::size_t>(r)]];
  }
  const Scalar scale = values.cwiseAbs().maxCoeff();
  const Scalar floor = Scalar(kSeparationFloorRel) * scale;
  for (Index r = 0; r + 1 < p; ++r)
    if (d[r + 1] - d[r] <= floor)
      throw EigenvalueCollisionError(
          "secular_roots: active eigenvalues coincide within the separation "
          "floor");

  const auto sol = detail::solve_active_secular(d, zeta, sigma, tol);
  Vector<Scalar> merged = values;
  for (Index r = 0; r < p; ++r)
    merged[split.active[static_cast<std::size_t>(r)]] = sol.roots[r];
  std::sort(merged.data(), merged.data() + merged.size());
  return merged;
}

// Eigenvectors of the perturbed matrix: column i is
// U * w / |w| with w_j = z_j / (values_j - new_values[i]) over the active
// set, while inert columns are copied through unchanged.  Values pair with
// columns positionally, so new_values[i] must hold the root that replaces
// values[i] (inert positions keep their old value); callers that sort
// afterwards must permute values and columns together.
template <class Scalar>
Matrix<Scalar> update_eigenvectors(const EigenDecomposition<Scalar>& decomp,
                                   const Vector<Scalar>& new_values,
                                   const Vector<Scalar>& z) {
  const Index n = decomp.size();
  if (new_values.size() != n || z.size() != n)
    throw std::invalid_argument("update_eigenvectors: dimension mismatch");
  const DeflationSplit split = deflate(z, Scalar(kDeflationTolRel));
  Matrix<Scalar> out = decomp.vectors;
  if (split.active.empty()) return out;

  const Index p = static_cast<Index>(split.active.size());
  Vector<Scalar> d(p), zeta(p);
  Matrix<Scalar> Ua(n, p);
  for (Index r = 0; r < p; ++r) {
    const Index idx = split.active[static_cast<std::size_t>(r)];
    d[r] = decomp.values[idx];
    zeta[r] = z[idx];
    Ua.col(r) = decomp.vectors.col(idx);
  }
  const Scalar scale = decomp.values.cwiseAbs().maxCoeff();
  const Scalar floor = Scalar(kSeparationFloorRel) * scale;

  Matrix<Scalar> deltas(p, p);
  for (Index r = 0; r < p; ++r) {
    const Scalar root = new_values[split.active[static_cast<std::size_t>(r)]];
    for (Index i = 0; i < p; ++i) {
      const Scalar delta = d[i] - root;
      if (std::abs(delta) <= floor)
        throw EigenvalueCollisionError(
            "update_eigenvectors: root coincides with an eigenvalue");
      deltas(i, r) = delta;
    }
  }
  const Vector<Scalar> zhat = detail::stabilized_weights(d, zeta, deltas);
  Matrix<Scalar> W(p, p);
  for (Index r = 0; r < p; ++r) {
    for (Index i = 0; i < p; ++i) W(i, r) = zhat[i] / deltas(i, r);
    W.col(r).normalize();
  }
  const Matrix<Scalar> updated = Ua * W;
  for (Index r = 0; r < p; ++r)
    out.col(split.active[static_cast<std::size_t>(r)]) = updated.col(r);
  return out;
}

// Eigendecomposition of U*diag(values)*U^T + sigma*v*v^T.  Pipeline:
// project v into the eigenbasis, rotate coincident eigenvalue pairs into a
// deflatable configuration, deflate, solve the secular equation on the
// active set, rebuild the active eigenvectors, and reorder ascending.
template <class Scalar>
EigenDecomposition<Scalar> rank_one_update(
    const EigenDecomposition<Scalar>& decomp,
    const RankOnePerturbation<Scalar>& pert,
    Scalar root_tol = Scalar(kSecularWidthRelTol)) {
  const Index n = decomp.size();
  if (pert.v.size() != n)
    throw std::invalid_argument("rank_one_update: dimension mismatch");
  if (!std::isfinite(pert.sigma))
    throw std::invalid_argument("rank_one_update: sigma must be finite");
  if (!pert.v.allFinite())
    throw std::invalid_argument("rank_one_update: v must be finite");
  detail::require_ascending(decomp.values, "rank_one_update");
  if (pert.sigma == Scalar(0) || pert.v.isZero(Scalar(0))) return decomp;

  Vector<Scalar> values = decomp.values;
  Matrix<Scalar> vectors = decomp.vectors;
  Vector<Scalar> z = vectors.transpose() * pert.v;

  // Coincident eigenvalues make the secular poles collide, so rotate the
  // z-mass of each such pair onto one index; the other deflates.  Running
  // the pass in ascending order pushes the mass through longer runs of
  // equal values as well.
  const Scalar scale = values.cwiseAbs().maxCoeff();
  const Scalar floor = Scalar(kSeparationFloorRel) * scale;
  for (Index i = 0; i + 1 < n; ++i) {
    if (values[i + 1] - values[i] > floor) continue;
    if (z[i] == Scalar(0)) continue;
    const Scalar r = std::hypot(z[i], z[i + 1]);
    const Scalar c = z[i + 1] / r;
    const Scalar s = z[i] / r;
    z[i] = Scalar(0);
    z[i + 1] = r;
    const Vector<Scalar> ui = vectors.col(i);
    vectors.col(i) = c * ui - s * vectors.col(i + 1);
    vectors.col(i + 1) = s * ui + c * vectors.col(i + 1);
  }

  const DeflationSplit split = deflate(z, Scalar(kDeflationTolRel));
  if (!split.active.empty()) {
    const Index p = static_cast<Index>(split.active.size());
    Vector<Scalar> d(p), zeta(p);
    Matrix<Scalar> Ua(n, p);
    for (Index r = 0; r < p; ++r) {
      const Index idx = split.active[static_cast<std::size_t>(r)];
      d[r] = values[idx];
      zeta[r] = z[idx];
      Ua.col(r) = vectors.col(idx);
    }
    const auto sol =
        detail::solve_active_secular(d, zeta, pert.sigma, root_tol);
    for (Index r = 0; r < p; ++r)
      for (Index i = 0; i < p; ++i)
        if (sol.deltas(i, r) == Scalar(0))
          throw EigenvalueCollisionError(
              "rank_one_update: root coincides with an eigenvalue");

    const Vector<Scalar> zhat = detail::stabilized_weights(d, zeta, sol.deltas);
    Matrix<Scalar> W(p, p);
    for (Index r = 0; r < p; ++r) {
      for (Index i = 0; i < p; ++i) W(i, r) = zhat[i] / sol.deltas(i, r);
      W.col(r).normalize();
    }
    const Matrix<Scalar> updated = Ua * W;
    for (Index r = 0; r < p; ++r) {
      const Index idx = split.active[static_cast<std::size_t>(r)];
      values[idx] = sol.roots[r];
      vectors.col(idx) = updated.col(r);
    }
  }

  // Roots may have passed inert eigenvalues, so restore the ascending order
  // jointly for values and columns.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });
  EigenDecomposition<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values[k] = values[order[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace ikpca
