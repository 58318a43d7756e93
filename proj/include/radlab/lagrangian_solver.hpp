#pragma once

// Spherically symmetric isentropic Navier-Stokes flow in Lagrangian mass
// coordinates y in [0, M0]:
//   v_t = (r^{N-1} u)_y,
//   r^{1-N} u_t + P_y = kappa (rho (r^{N-1} u)_y)_y,   P = a rho^gamma.
//
// Staggered grid: specific volume v and pressure at cells, velocity u and
// radius r at nodes.  Viscosity is implicit and pressure explicit.  The
// implicit solve is written for s = r^{N-1} u, which keeps the system
// symmetric positive definite and makes the discrete energy balance exact:
//   E(n+1) - E(n) = -kappa dt sum v D^2 dm - sum (du)^2/2 dm
//                   + sum e''(xi) (dv)^2/2 dm,
// where D = (s_{j+1} - s_j)/(dm v_j) is the discrete div U.  The last term is
// dominated by the viscous one when c^2 dt <= 2 kappa, which the time step
// limit enforces.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "radlab/radial_fields.hpp"
#include "radlab/tridiagonal.hpp"

namespace radlab {

/// Pressure constant a, adiabatic exponent gamma, shear and bulk viscosities.
struct GasParams {
  double a = 1.0;
  double gamma = 1.4;
  double mu = 1.0;
  double lambda = 0.0;

  double kappa() const { return 2.0 * mu + lambda; }

  double pressure(double v) const { return a * std::pow(v, -gamma); }

  double sound_speed(double v) const { return std::sqrt(a * gamma * std::pow(v, 1.0 - gamma)); }

  /// Throws std::invalid_argument naming the violated constraint.
  void validate(int dim) const {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("a: pressure constant must be > 0");
    if (!(gamma > 1.0) || !std::isfinite(gamma))
      throw std::invalid_argument("gamma: adiabatic exponent must be > 1");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu: viscosity must be > 0");
    if (!std::isfinite(lambda)) throw std::invalid_argument("lambda: must be finite");
    if (mu + 0.5 * dim * lambda < 0.0)
      throw std::invalid_argument("lambda: mu + (N/2) lambda must be >= 0");
    if (!(kappa() > 0.0)) throw std::invalid_argument("lambda: kappa = 2 mu + lambda must be > 0");
  }
};

enum class Splitting { FirstOrder, Strang };

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PositivityLoss : public SolverError {
 public:
  PositivityLoss(std::size_t cell, double v)
      : SolverError("specific volume lost positivity in cell " + std::to_string(cell) +
                    " (v = " + std::to_string(v) + ")"),
        cell_(cell) {}
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

class StabilityViolation : public SolverError {
 public:
  using SolverError::SolverError;
};

/// One time level.  Cells j = 0..J-1 lie between nodes j and j+1.
struct LagrangianState {
  int dim = 3;
  double t = 0.0;
  double dm = 0.0;                // mass per cell
  double wall_radius = 1.0;       // R
  std::vector<double> v;          // J cells
  std::vector<double> u;          // J+1 nodes, u[0] = u[J] = 0
  std::vector<double> r;          // J+1 nodes, r[0] = 0
  double dissipated = 0.0;        // kappa int_0^t sum v D^2 dm ds
  double raw_radius_drift = 0.0;  // max |r + dt u - r_geometric| at the last step

  std::size_t cells() const { return v.size(); }
  double mass() const { return dm * static_cast<double>(v.size()); }
  double radius() const { return r.back(); }
  double rho(std::size_t j) const { return 1.0 / v[j]; }

  /// r_j^{N-1}.
  double area(std::size_t j) const { return std::pow(r[j], dim - 1); }
};

namespace detail {

// r_j = (N sum_{i<j} v_i dm)^{1/N}.
inline std::vector<double> radii_from_volumes(const std::vector<double>& v, double dm, int dim) {
  std::vector<double> r(v.size() + 1, 0.0);
  double cum = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    cum += v[j] * dm;
    r[j + 1] = std::pow(dim * cum, 1.0 / dim);
  }
  return r;
}

inline std::vector<double> areas(const std::vector<double>& r, int dim) {
  std::vector<double> a(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) a[j] = std::pow(r[j], dim - 1);
  return a;
}

// Solves for s at interior nodes 1..J-1:
//   s_j/A_j^2 - c [(s_{j+1}-s_j)/v_j - (s_j-s_{j-1})/v_{j-1}] = rhs_j,
// with s_0 = s_J = 0.  Returns s on all J+1 nodes.
inline std::vector<double> viscous_solve(const std::vector<double>& area,
                                         const std::vector<double>& v, double c,
                                         const std::vector<double>& rhs) {
  const std::size_t jn = v.size();
  const std::size_t n = jn - 1;
  std::vector<double> sub(n), diag(n), super(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + 1;
    diag[k] = 1.0 / (area[j] * area[j]) + c * (1.0 / v[j] + 1.0 / v[j - 1]);
    sub[k] = -c / v[j - 1];
    super[k] = -c / v[j];
    b[k] = rhs[j];
  }
  const auto x = solve_tridiagonal(sub, diag, super, std::move(b));
  std::vector<double> s(jn + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) s[k + 1] = x[k];
  return s;
}

inline std::vector<double> advance_volume(const std::vector<double>& v, const std::vector<double>& s,
                                          double dt, double dm) {
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = v[j] + dt * (s[j + 1] - s[j]) / dm;
    if (!(out[j] > 0.0) || !std::isfinite(out[j])) throw PositivityLoss(j, out[j]);
  }
  return out;
}

inline double viscous_work(const std::vector<double>& v, const std::vector<double>& s, double dm,
                           double kappa, double dt) {
  double w = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double d = (s[j + 1] - s[j]) / (dm * v[j]);
    w += v[j] * d * d * dm;
  }
  return kappa * dt * w;
}

// u_j += -h A_j (P_j - P_{j-1}) / dm at interior nodes.
inline void pressure_kick(std::vector<double>& u, const std::vector<double>& area,
                          const std::vector<double>& v, const GasParams& gas, double h, double dm) {
  for (std::size_t j = 1; j + 1 < u.size(); ++j)
    u[j] -= h * area[j] * (gas.pressure(v[j]) - gas.pressure(v[j - 1])) / dm;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace detail

/// Maps rho0, u0 onto J equal-mass cells.  Cell volumes are exact cell
/// averages, so r_j^N = N sum_{i<j} v_i dm holds at t = 0.
inline LagrangianState init(const RadialProfile& rho0, const RadialProfile& u0, const GasParams& gas,
                            std::size_t cells) {
  const auto& g = rho0.grid();
  const int dim = g.dim();
  gas.validate(dim);
  if (u0.grid().dim() != dim || std::abs(u0.grid().radius() - g.radius()) > 1e-14 * g.radius())
    throw std::invalid_argument("rho0 and u0 must live on balls of the same radius and dimension");
  if (cells < RadialGrid::min_intervals)
    throw std::invalid_argument("at least 16 mass cells are required");
  for (double x : rho0.values())
    if (!(x > 0.0)) throw std::invalid_argument("initial density must be bounded away from vacuum");
  const double utol = 1e-12 * std::max(1.0, u0.sup_abs());
  if (std::abs(u0[0]) > utol || std::abs(u0[u0.size() - 1]) > utol)
    throw std::invalid_argument("initial velocity must vanish at the center and the wall");

  const auto cum = cumulative_moments(rho0);
  const double mass = cum.back();
  const double dm = mass / static_cast<double>(cells);
  const double radius = g.radius();

  // Inverts y(r) = int_0^r rho0 s^{N-1} ds interval by interval.
  auto partial = [&](std::size_t i, double b) {
    auto [first, w] = g.interval_weights(i, g.node(i), b);
    double s = cum[i];
    for (std::size_t k = 0; k < 4 && first + k < g.size(); ++k) s += w[k] * rho0[first + k];
    return s;
  };
  LagrangianState st;
  st.dim = dim;
  st.dm = dm;
  st.wall_radius = radius;
  st.r.assign(cells + 1, 0.0);
  st.r[cells] = radius;
  for (std::size_t j = 1; j < cells; ++j) {
    const double target = dm * static_cast<double>(j);
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t i = static_cast<std::size_t>(std::distance(cum.begin(), it));
    i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, g.intervals() - 1);
    double lo = g.node(i), hi = g.node(i + 1);
    for (int iter = 0; iter < 200 && hi - lo > 4e-16 * radius; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (partial(i, mid) < target ? lo : hi) = mid;
    }
    st.r[j] = 0.5 * (lo + hi);
    if (!(st.r[j] > st.r[j - 1])) throw std::invalid_argument("cumulative mass is not increasing");
  }
  st.v.resize(cells);
  for (std::size_t j = 0; j < cells; ++j)
    st.v[j] = (std::pow(st.r[j + 1], dim) - std::pow(st.r[j], dim)) / (dim * dm);
  st.u.assign(cells + 1, 0.0);
  for (std::size_t j = 1; j < cells; ++j) st.u[j] = u0.at(st.r[j]);
  return st;
}

/// Largest admissible dt: the acoustic limit cfl * min dr/c, and the
/// energy-monotonicity limit c^2 dt <= kappa.
inline double stability_limit(const LagrangianState& st, const GasParams& gas, double cfl = 0.4) {
  double acoustic = INFINITY, c2max = 0.0;
  for (std::size_t j = 0; j < st.cells(); ++j) {
    const double c = gas.sound_speed(st.v[j]);
    acoustic = std::min(acoustic, (st.r[j + 1] - st.r[j]) / c);
    c2max = std::max(c2max, c * c);
  }
  return std::min(cfl * acoustic, gas.kappa() / c2max);
}

namespace detail {

inline LagrangianState first_order_step(const LagrangianState& st, const GasParams& gas, double dt) {
  const std::size_t jn = st.cells();
  const auto area = areas(st.r, st.dim);
  const double c = dt * gas.kappa() / (st.dm * st.dm);
  std::vector<double> rhs(jn + 1, 0.0);
  for (std::size_t j = 1; j < jn; ++j)
    rhs[j] = st.u[j] / area[j] -
             dt / st.dm * (gas.pressure(st.v[j]) - gas.pressure(st.v[j - 1]));
  const auto s = viscous_solve(area, st.v, c, rhs);

  LagrangianState out;
  out.dim = st.dim;
  out.dm = st.dm;
  out.wall_radius = st.wall_radius;
  out.t = st.t + dt;
  out.v = advance_volume(st.v, s, dt, st.dm);
  out.u.assign(jn + 1, 0.0);
  for (std::size_t j = 1; j < jn; ++j) out.u[j] = s[j] / area[j];
  out.dissipated = st.dissipated + viscous_work(st.v, s, st.dm, gas.kappa(), dt);
  out.r = radii_from_volumes(out.v, st.dm, st.dim);
  std::vector<double> raw(st.r);
  for (std::size_t j = 0; j <= jn; ++j) raw[j] += dt * out.u[j];
  out.raw_radius_drift = max_abs_diff(raw, out.r);
  return out;
}

// Half pressure kick, Crank-Nicolson viscous step with midpoint
// coefficients from a backward-Euler predictor, half kick with the new
// pressure.
inline LagrangianState strang_step(const LagrangianState& st, const GasParams& gas, double dt) {
  const std::size_t jn = st.cells();
  const double kappa = gas.kappa();
  const auto area = areas(st.r, st.dim);

  std::vector<double> ustar = st.u;
  pressure_kick(ustar, area, st.v, gas, 0.5 * dt, st.dm);

  std::vector<double> rhs(jn + 1, 0.0);
  for (std::size_t j = 1; j < jn; ++j) rhs[j] = ustar[j] / area[j];
  const auto sp = viscous_solve(area, st.v, dt * kappa / (st.dm * st.dm), rhs);
  const auto vp = advance_volume(st.v, sp, dt, st.dm);
  const auto rp = radii_from_volumes(vp, st.dm, st.dim);

  std::vector<double> vh(jn), rh(jn + 1);
  for (std::size_t j = 0; j < jn; ++j) vh[j] = 0.5 * (st.v[j] + vp[j]);
  for (std::size_t j = 0; j <= jn; ++j) rh[j] = 0.5 * (st.r[j] + rp[j]);
  const auto ah = areas(rh, st.dim);

  for (std::size_t j = 1; j < jn; ++j) rhs[j] = ustar[j] / ah[j];
  const auto sbar = viscous_solve(ah, vh, 0.5 * dt * kappa / (st.dm * st.dm), rhs);

  LagrangianState out;
  out.dim = st.dim;
  out.dm = st.dm;
  out.wall_radius = st.wall_radius;
  out.t = st.t + dt;
  out.v = advance_volume(st.v, sbar, dt, st.dm);
  out.dissipated = st.dissipated + viscous_work(vh, sbar, st.dm, kappa, dt);
  out.r = radii_from_volumes(out.v, st.dm, st.dim);
  out.u.assign(jn + 1, 0.0);
  for (std::size_t j = 1; j < jn; ++j) out.u[j] = 2.0 * sbar[j] / ah[j] - ustar[j];
  pressure_kick(out.u, areas(out.r, st.dim), out.v, gas, 0.5 * dt, st.dm);

  std::vector<double> raw(st.r);
  for (std::size_t j = 0; j <= jn; ++j) raw[j] += dt * 0.5 * (st.u[j] + out.u[j]);
  out.raw_radius_drift = max_abs_diff(raw, out.r);
  return out;
}

}  // namespace detail

/// Advances one step; the input state is not modified.
inline LagrangianState step(const LagrangianState& st, const GasParams& gas, double dt,
                            Splitting splitting = Splitting::FirstOrder, double cfl = 0.4) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  const double limit = stability_limit(st, gas, cfl);
  if (dt > limit * (1.0 + 1e-9))
    throw StabilityViolation("dt = " + std::to_string(dt) + " exceeds the stability limit " +
                             std::to_string(limit));
  return splitting == Splitting::Strang ? detail::strang_step(st, gas, dt)
                                        : detail::first_order_step(st, gas, dt);
}

/// sum (u^2/2) dm over nodes + sum a v^{1-gamma}/(gamma-1) dm over cells.
inline double kinetic_energy(const LagrangianState& st) {
  double k = 0.0;
  for (double x : st.u) k += 0.5 * x * x * st.dm;
  return k;
}

inline double internal_energy(const LagrangianState& st, const GasParams& gas) {
  double e = 0.0;
  for (double x : st.v) e += gas.a * std::pow(x, 1.0 - gas.gamma) / (gas.gamma - 1.0) * st.dm;
  return e;
}

inline double energy(const LagrangianState& st, const GasParams& gas) {
  return kinetic_energy(st) + internal_energy(st, gas);
}

/// max_j |r_j^N - N sum_{i<j} v_i dm|.
inline double geometric_consistency_error(const LagrangianState& st) {
  double cum = 0.0, err = 0.0;
  for (std::size_t j = 0; j < st.cells(); ++j) {
    cum += st.v[j] * st.dm;
    err = std::max(err, std::abs(std::pow(st.r[j + 1], st.dim) - st.dim * cum));
  }
  return err;
}

/// Eulerian picture of a state: the node radii as a radial grid, u at those
/// nodes, and nodal densities 2/(v_{j-1} + v_j) (one-sided at the ends).
struct EulerianView {
  GridPtr grid;
  RadialProfile u;
  RadialProfile rho;
};

inline EulerianView eulerian_view(const LagrangianState& st) {
  auto grid = RadialGrid::from_nodes(st.r, st.dim);
  const std::size_t jn = st.cells();
  std::vector<double> rho(jn + 1);
  rho[0] = 1.0 / st.v[0];
  rho[jn] = 1.0 / st.v[jn - 1];
  for (std::size_t j = 1; j < jn; ++j) rho[j] = 2.0 / (st.v[j - 1] + st.v[j]);
  return {grid, RadialProfile(grid, st.u), RadialProfile(grid, std::move(rho))};
}

/// ||f||_{L^p(Omega)} of a cell quantity via dx = omega v dm.
inline double cell_lp_norm(const LagrangianState& st, const std::vector<double>& f, double p) {
  const double omega = WeightedNormConvention::for_dimension(st.dim).omega;
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += std::pow(std::abs(f[j]), p) * st.v[j] * st.dm;
  return std::pow(omega * s, 1.0 / p);
}

inline std::vector<double> cell_pressure(const LagrangianState& st, const GasParams& gas) {
  std::vector<double> p(st.cells());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = gas.pressure(st.v[j]);
  return p;
}

}  // namespace radlab
