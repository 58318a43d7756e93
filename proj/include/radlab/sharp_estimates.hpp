#pragma once

// Sup-norm and pointwise L^p bounds on the gradient of a radially symmetric
// vector field in terms of its divergence.
//
// For U = u(r) x/r the gradient matrix is
//   dU_j/dx_i = (x_i x_j / r^2) u_r + (delta_ij - x_i x_j / r^2) u/r,
// a rank-one split whose eigenvalues are u_r (once) and u/r (N-1 times).
// The pointwise spectral norm is therefore max(|u_r|, |u/r|).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "radlab/radial_fields.hpp"

namespace radlab {

/// Default acceptance tolerance for inequality checks: |lhs - rhs| measured
/// against abs + rel * max(|lhs|, |rhs|).
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-7;

  double allowance(double lhs, double rhs) const {
    return abs + rel * std::max(std::abs(lhs), std::abs(rhs));
  }
};

/// One checked inequality lhs <= rhs.
struct EstimateReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool satisfied = true;
  double witness_radius = 0.0;

  static EstimateReport make(double lhs, double rhs, double witness, Tolerance tol = {}) {
    EstimateReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.satisfied = r.margin >= -tol.allowance(lhs, rhs);
    r.witness_radius = witness;
    return r;
  }

  /// lhs / rhs, or 0 when both sides vanish.
  double ratio() const {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return lhs / rhs;
  }
};

/// The two eigenvalue profiles of grad U.
struct GradientSpectrum {
  RadialProfile radial;      // u_r, multiplicity 1
  RadialProfile tangential;  // u/r, multiplicity N-1

  double spectral_norm_at(std::size_t i) const {
    return std::max(std::abs(radial[i]), std::abs(tangential[i]));
  }
};

inline GradientSpectrum gradient_spectrum(const RadialProfile& u) {
  return {radial_derivative(u), ratio_over_radius(u)};
}

/// sup_r |grad U(r)|_2.
inline double gradient_sup_norm(const RadialProfile& u) {
  const auto spec = gradient_spectrum(u);
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, spec.spectral_norm_at(i));
  return m;
}

/// Frobenius norm |grad U|_F = sqrt(u_r^2 + (N-1)(u/r)^2) at every node.
inline RadialProfile gradient_frobenius(const RadialProfile& u) {
  const auto spec = gradient_spectrum(u);
  const int n = u.grid().dim();
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::sqrt(spec.radial[i] * spec.radial[i] +
                     (n - 1) * spec.tangential[i] * spec.tangential[i]);
  return {u.grid_ptr(), std::move(f)};
}

struct LinftyBounds {
  EstimateReport lower;  // (1/N) ||div U||_inf <= ||grad U||_inf
  EstimateReport upper;  // ||grad U||_inf <= (2 + 1/N) ||div U||_inf

  bool satisfied() const { return lower.satisfied && upper.satisfied; }
};

inline LinftyBounds verify_linfty_bounds(const RadialProfile& u, Tolerance tol = {}) {
  const auto spec = gradient_spectrum(u);
  const auto div = divergence(u);
  const double n = u.grid().dim();

  std::size_t grad_at = 0, div_at = 0;
  double grad_sup = 0.0, div_sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double g = spec.spectral_norm_at(i);
    if (g > grad_sup) grad_sup = g, grad_at = i;
    if (std::abs(div[i]) > div_sup) div_sup = std::abs(div[i]), div_at = i;
  }
  const auto r = u.grid().nodes();
  return {EstimateReport::make(div_sup / n, grad_sup, r[div_at], tol),
          EstimateReport::make(grad_sup, (2.0 + 1.0 / n) * div_sup, r[grad_at], tol)};
}

struct PointwiseLpBounds {
  EstimateReport ratio;       // |u/r| <= (1/N)^{1-1/p} r^{-N/p} omega^{-1/p} ||div U||_p
  EstimateReport derivative;  // |u_r| <= (1 + (N-1)(...)) ||div U||_p

  bool satisfied() const { return ratio.satisfied && derivative.satisfied; }
};

namespace detail {

// Tracks the node with the largest lhs/rhs ratio (scale invariant) and
// whether every offered node passed.
struct WorstMargin {
  Tolerance tol;
  EstimateReport worst{};
  double worst_ratio = -1.0;
  bool all_satisfied = true;

  void offer(double lhs, double rhs, double radius) {
    const auto node = EstimateReport::make(lhs, rhs, radius, tol);
    all_satisfied = all_satisfied && node.satisfied;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = node;
    }
  }

  EstimateReport result() const {
    auto r = worst;
    r.satisfied = all_satisfied;
    return r;
  }
};

}  // namespace detail

/// Checks both pointwise bounds at every node r > 0 and returns the worst node of each.
inline PointwiseLpBounds pointwise_lp_bound(const RadialProfile& u, double p, Tolerance tol = {}) {
  if (std::isinf(p)) throw std::invalid_argument("p = infinity: use verify_linfty_bounds");
  if (!(p >= 1.0)) throw std::invalid_argument("L^p exponent must be >= 1");
  const auto spec = gradient_spectrum(u);
  const double div_norm = lp_norm(divergence(u), p);
  const auto& g = u.grid();
  const double n = g.dim();
  const double lead = std::pow(1.0 / n, 1.0 - 1.0 / p) * std::pow(g.omega(), -1.0 / p);

  detail::WorstMargin ratio{tol}, deriv{tol};
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double r = g.node(i);
    const double factor = lead * std::pow(r, -n / p);
    ratio.offer(std::abs(spec.tangential[i]), factor * div_norm, r);
    deriv.offer(std::abs(spec.radial[i]), (1.0 + (n - 1.0) * factor) * div_norm, r);
  }
  return {ratio.result(), deriv.result()};
}

/// u(r) = r^{1-N} int_0^r s^{N-1} F ds, the inverse of the divergence.
inline RadialProfile reconstruct_u_from_div(const RadialProfile& f) {
  const auto moments = cumulative_moments(f);
  const auto r = f.grid().nodes();
  const int n = f.grid().dim();
  std::vector<double> u(f.size(), 0.0);
  for (std::size_t i = 1; i < u.size(); ++i) u[i] = moments[i] / std::pow(r[i], n - 1);
  return {f.grid_ptr(), std::move(u)};
}

}  // namespace radlab
