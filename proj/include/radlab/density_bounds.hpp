#pragma once

// The density representation along a computed trajectory.  With
// y-integrals taken over the nodes between the center cell and cell k,
//
//   rho(t,k)/rho(t,0) = rho0(k)/rho0(0) * Psi1 * Psi2 * Psi3,
//   Psi1 = exp(kappa^-1 int_0^y [(r^{1-N}u)(0,z) - (r^{1-N}u)(t,z)] dz),
//   Psi2 = exp(kappa^-1 int_0^t [p(s,0) - p(s,y)] ds),
//   Psi3 = exp(-kappa^-1 int_0^t int_0^y (N-1) u^2/r^N dz ds),
//
// and with PU = Pcal(t) Ucal(t,y),
//   rho = PU exp(-kappa^-1 int_0^t p(s,y) ds)
//       = PU / (1 + (a gamma/kappa) int_0^t PU^gamma ds)^{1/gamma}.
//
// The discrete y-sums telescope the momentum equation exactly, so the
// residuals measure only the time discretization.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "radlab/lagrangian_solver.hpp"
#include "radlab/radial_fields.hpp"

namespace radlab {

/// G = kappa div U - a rho^gamma on the node radii.
inline RadialProfile effective_flux(const LagrangianState& st, const GasParams& gas) {
  const auto view = eulerian_view(st);
  const auto div = divergence(view.u);
  std::vector<double> g(div.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = gas.kappa() * div[i] - gas.a * std::pow(view.rho[i], gas.gamma);
  return {view.grid, std::move(g)};
}

struct PsiFactors {
  double psi1 = 1.0, psi2 = 1.0, psi3 = 1.0;
  double product() const { return psi1 * psi2 * psi3; }
};

struct AccumulatorAudit {
  double max_relative_error = 0.0;
  bool consistent = true;
};

/// Time-ordered states plus trapezoid accumulators of the time integrals in
/// the representation, kept per recorded step.
class Trajectory {
 public:
  Trajectory(LagrangianState initial, GasParams gas) : gas_(gas) {
    if (initial.cells() < 2) throw std::invalid_argument("trajectory needs at least two cells");
    states_.push_back(std::move(initial));
    const std::size_t jn = states_[0].cells();
    pressure_.push_back(std::vector<double>(jn, 0.0));
    centrifugal_.push_back(std::vector<double>(jn, 0.0));
    pu_gamma_.push_back(std::vector<double>(jn, 0.0));
    sup_u_.push_back(0.0);
    initial_w_ = velocity_sums(states_[0]);
    finish_level(0);
  }

  void append(LagrangianState next) {
    const auto& prev = states_.back();
    if (!(next.t > prev.t)) throw std::invalid_argument("trajectory times must increase");
    if (next.cells() != prev.cells()) throw std::invalid_argument("cell count changed");
    const double dt = next.t - prev.t;
    const std::size_t jn = prev.cells();
    const std::size_t k = states_.size() - 1;

    const auto cp = centrifugal_sums(prev), cn = centrifugal_sums(next);
    std::vector<double> ip(jn), ic(jn);
    for (std::size_t j = 0; j < jn; ++j) {
      ip[j] = pressure_[k][j] + 0.5 * dt * (gas_.pressure(prev.v[j]) + gas_.pressure(next.v[j]));
      ic[j] = centrifugal_[k][j] + 0.5 * dt * (cp[j] + cn[j]);
    }
    states_.push_back(std::move(next));
    pressure_.push_back(std::move(ip));
    centrifugal_.push_back(std::move(ic));
    pu_gamma_.push_back(pu_gamma_[k]);
    sup_u_.push_back(sup_u_[k]);
    finish_level(k + 1);
    for (std::size_t j = 0; j < jn; ++j)
      pu_gamma_[k + 1][j] += 0.5 * dt * (std::pow(pu_[k][j], gas_.gamma) +
                                         std::pow(pu_[k + 1][j], gas_.gamma));
  }

  std::size_t size() const { return states_.size(); }
  const LagrangianState& state(std::size_t k) const { return states_.at(k); }
  const LagrangianState& back() const { return states_.back(); }
  double time(std::size_t k) const { return states_.at(k).t; }
  const GasParams& gas() const { return gas_; }

  /// Index of the recorded level at time t.
  std::size_t index_of(double t) const {
    const double t0 = states_.front().t, t1 = states_.back().t;
    const double eps = 1e-12 * std::max(1.0, std::abs(t1));
    if (t < t0 - eps || t > t1 + eps) throw std::out_of_range("time outside the trajectory");
    auto it = std::lower_bound(states_.begin(), states_.end(), t - eps,
                               [](const LagrangianState& s, double x) { return s.t < x; });
    if (it == states_.end() || std::abs(it->t - t) > eps)
      throw std::invalid_argument("time is not a recorded level");
    return static_cast<std::size_t>(std::distance(states_.begin(), it));
  }

  /// int_0^{t_k} p(s, cell j) ds.
  double pressure_integral(std::size_t k, std::size_t j) const { return pressure_.at(k).at(j); }

  /// int_0^{t_k} sum_{nodes 1..j} (N-1) u^2/r^N dm ds.
  double centrifugal_integral(std::size_t k, std::size_t j) const {
    return centrifugal_.at(k).at(j);
  }

  /// int_0^{t_k} (Pcal Ucal)^gamma ds at cell j.
  double pu_gamma_integral(std::size_t k, std::size_t j) const { return pu_gamma_.at(k).at(j); }

  PsiFactors psi(std::size_t k, std::size_t j) const {
    check(k, j);
    const double kappa = gas_.kappa();
    const auto& w = velocity_w_.at(k);
    PsiFactors f;
    f.psi1 = std::exp((initial_w_[j] - w[j]) / kappa);
    f.psi2 = std::exp((pressure_[k][0] - pressure_[k][j]) / kappa);
    f.psi3 = std::exp(-centrifugal_[k][j] / kappa);
    return f;
  }

  /// Pcal(t_k) = rho(t,0)/rho0(0) exp(kappa^-1 int_0^t p(s,0) ds).
  double pcal(std::size_t k) const {
    check(k, 0);
    return states_[0].v[0] / states_[k].v[0] * std::exp(pressure_[k][0] / gas_.kappa());
  }

  /// Ucal(t_k, j) = rho0(j) Psi1 Psi3.
  double ucal(std::size_t k, std::size_t j) const {
    const auto f = psi(k, j);
    return f.psi1 * f.psi3 / states_[0].v[j];
  }

  /// sup of Ucal over [0, t_k] x all cells.
  double sup_ucal(std::size_t k) const { return sup_u_.at(k); }
  double inf_ucal(std::size_t k) const { return inf_u_.at(k); }

  /// Recomputes every accumulator from the stored states and compares.
  AccumulatorAudit reintegrate(double tol = 1e-10) const {
    AccumulatorAudit audit;
    const std::size_t jn = states_[0].cells();
    std::vector<double> ip(jn, 0.0), ic(jn, 0.0);
    for (std::size_t k = 1; k < states_.size(); ++k) {
      const auto& a = states_[k - 1];
      const auto& b = states_[k];
      const double dt = b.t - a.t;
      const auto ca = centrifugal_sums(a), cb = centrifugal_sums(b);
      for (std::size_t j = 0; j < jn; ++j) {
        ip[j] += dt * (gas_.pressure(a.v[j]) + gas_.pressure(b.v[j])) / 2.0;
        ic[j] += dt * (ca[j] + cb[j]) / 2.0;
        auto rel = [](double x, double y) {
          return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
        };
        audit.max_relative_error = std::max(
            {audit.max_relative_error, rel(ip[j], pressure_[k][j]),
             ic[j] == 0.0 && centrifugal_[k][j] == 0.0 ? 0.0 : rel(ic[j], centrifugal_[k][j])});
      }
    }
    audit.consistent = audit.max_relative_error <= tol;
    return audit;
  }

 private:
  void check(std::size_t k, std::size_t j) const {
    if (k >= states_.size()) throw std::out_of_range("trajectory level out of range");
    if (j >= states_[0].cells()) throw std::out_of_range("cell index out of range");
  }

  // sum_{nodes 1..j} dm u_i / r_i^{N-1}, indexed by cell j.
  static std::vector<double> velocity_sums(const LagrangianState& s) {
    std::vector<double> w(s.cells(), 0.0);
    for (std::size_t j = 1; j < s.cells(); ++j) w[j] = w[j - 1] + s.dm * s.u[j] / s.area(j);
    return w;
  }

  // sum_{nodes 1..j} dm (N-1) u_i^2 / r_i^N, indexed by cell j.
  static std::vector<double> centrifugal_sums(const LagrangianState& s) {
    std::vector<double> c(s.cells(), 0.0);
    for (std::size_t j = 1; j < s.cells(); ++j)
      c[j] = c[j - 1] + s.dm * (s.dim - 1) * s.u[j] * s.u[j] / std::pow(s.r[j], s.dim);
    return c;
  }

  void finish_level(std::size_t k) {
    velocity_w_.push_back(velocity_sums(states_[k]));
    const std::size_t jn = states_[k].cells();
    std::vector<double> pu(jn);
    const double p = pcal(k);
    double hi = k == 0 ? 0.0 : sup_u_[k - 1];
    double lo = k == 0 ? INFINITY : inf_u_[k - 1];
    for (std::size_t j = 0; j < jn; ++j) {
      const double uc = ucal(k, j);
      pu[j] = p * uc;
      hi = std::max(hi, uc);
      lo = std::min(lo, uc);
    }
    pu_.push_back(std::move(pu));
    sup_u_[k] = hi;
    inf_u_.push_back(lo);
  }

  GasParams gas_;
  std::vector<LagrangianState> states_;
  std::vector<std::vector<double>> pressure_, centrifugal_, pu_gamma_, velocity_w_, pu_;
  std::vector<double> initial_w_, sup_u_, inf_u_;
};

inline PsiFactors psi_factors(const Trajectory& traj, double t, std::size_t cell) {
  return traj.psi(traj.index_of(t), cell);
}

struct RepresentationReport {
  double t = 0.0;
  std::size_t worst_cell = 0;
  double pcal = 1.0;
  double factorization_residual = 0.0;  // |rho - rho(t,0) rho0(y)/rho0(0) Psi1 Psi2 Psi3| / rho
  double exponential_residual = 0.0;    // |rho - Pcal Ucal exp(-int p/kappa)| / rho
  double closed_form_residual = 0.0;    // |rho - Pcal Ucal / (1 + ...)^{1/gamma}| / rho
  double equivalence_residual = 0.0;    // |closed form - factorized form| / rho
  bool satisfied = true;

  double max_residual() const {
    return std::max({factorization_residual, exponential_residual, closed_form_residual,
                     equivalence_residual});
  }
};

namespace detail {

inline RepresentationReport representation_at(const Trajectory& traj, std::size_t k,
                                              std::size_t j) {
  const auto& gas = traj.gas();
  const auto& s0 = traj.state(0);
  const auto& st = traj.state(k);
  const double kappa = gas.kappa();
  const double rho = st.rho(j);
  const auto f = traj.psi(k, j);
  const double factorized = st.rho(0) * s0.rho(j) / s0.rho(0) * f.product();
  const double pu = traj.pcal(k) * traj.ucal(k, j);
  const double exponential = pu * std::exp(-traj.pressure_integral(k, j) / kappa);
  const double closed =
      pu / std::pow(1.0 + gas.a * gas.gamma / kappa * traj.pu_gamma_integral(k, j), 1.0 / gas.gamma);
  RepresentationReport r;
  r.t = st.t;
  r.worst_cell = j;
  r.pcal = traj.pcal(k);
  r.factorization_residual = std::abs(rho - factorized) / rho;
  r.exponential_residual = std::abs(rho - exponential) / rho;
  r.closed_form_residual = std::abs(rho - closed) / rho;
  r.equivalence_residual = std::abs(closed - factorized) / rho;
  return r;
}

}  // namespace detail

/// Residuals of the representation at one (t, cell).
inline RepresentationReport verify_representation(const Trajectory& traj, double t,
                                                  std::size_t cell, double tol = 1e-3) {
  auto r = detail::representation_at(traj, traj.index_of(t), cell);
  r.satisfied = r.max_residual() <= tol;
  return r;
}

/// Worst residuals over all cells at level k.
inline RepresentationReport representation_residuals(const Trajectory& traj, std::size_t k,
                                                     double tol = 1e-3) {
  RepresentationReport worst;
  worst.t = traj.time(k);
  worst.pcal = traj.pcal(k);
  for (std::size_t j = 0; j < traj.state(k).cells(); ++j) {
    const auto r = detail::representation_at(traj, k, j);
    if (r.factorization_residual > worst.factorization_residual) worst.worst_cell = j;
    worst.factorization_residual = std::max(worst.factorization_residual, r.factorization_residual);
    worst.exponential_residual = std::max(worst.exponential_residual, r.exponential_residual);
    worst.closed_form_residual = std::max(worst.closed_form_residual, r.closed_form_residual);
    worst.equivalence_residual = std::max(worst.equivalence_residual, r.equivalence_residual);
  }
  worst.satisfied = worst.max_residual() <= tol;
  return worst;
}

struct VolumeReport {
  double total = 0.0;     // sum v dm
  double expected = 0.0;  // R^N / N
  double relative_error = 0.0;
  bool satisfied = true;
};

inline VolumeReport verify_volume_constraint(const LagrangianState& st, double tol = 1e-8) {
  VolumeReport r;
  for (double x : st.v) r.total += x * st.dm;
  r.expected = std::pow(st.wall_radius, st.dim) / st.dim;
  r.relative_error = std::abs(r.total - r.expected) / r.expected;
  r.satisfied = r.relative_error <= tol;
  return r;
}

struct DensityBoundReport {
  double t = 0.0;
  double rho_max = 0.0;
  double pcal = 1.0;
  double sup_ucal = 0.0;
  double rhs = 0.0;           // Pcal(t) sup_{Q_{t,0}} Ucal
  double gronwall_rhs = 0.0;  // (E0/M0)^{1/(gamma-1)} sup U^-1 exp(t sup U^-gamma sup U^gamma), C = 1
  double margin = 0.0;        // rhs - rho_max
  bool satisfied = true;
};

/// max_y rho(t,y) <= Pcal(t) sup Ucal over [0,t] x [0,M0].
inline DensityBoundReport density_bound_monitor(const Trajectory& traj, double t,
                                                double tol = 1e-12) {
  const std::size_t k = traj.index_of(t);
  const auto& st = traj.state(k);
  const auto& gas = traj.gas();
  DensityBoundReport r;
  r.t = st.t;
  for (std::size_t j = 0; j < st.cells(); ++j) r.rho_max = std::max(r.rho_max, st.rho(j));
  r.pcal = traj.pcal(k);
  r.sup_ucal = traj.sup_ucal(k);
  r.rhs = r.pcal * r.sup_ucal;
  r.margin = r.rhs - r.rho_max;
  // The bound is exact given the closed form, so the allowance is the
  // representation residual at this level.
  const double allowance = representation_residuals(traj, k).max_residual() + tol;
  r.satisfied = r.rho_max <= r.rhs * (1.0 + allowance);

  const double e0 = energy(traj.state(0), gas);
  const double m0 = st.mass();
  const double inv_inf = 1.0 / traj.inf_ucal(k);
  r.gronwall_rhs = std::pow(e0 / m0, 1.0 / (gas.gamma - 1.0)) * inv_inf *
                   std::exp(st.t * std::pow(inv_inf * r.sup_ucal, gas.gamma));
  return r;
}

struct PressureL6Report {
  std::vector<double> times;
  std::vector<double> l6_sixth;   // ||P||_{L^6}^6
  std::vector<double> majorant;   // ||P0||^6 + C int ||P||_inf^12
  double fitted_constant = 0.0;   // (6 gamma - 1) max int |P^6 div u| / ||P||_inf^12
  double transport_residual = 0.0;
  bool holds = true;
};

/// Tracks ||P||_6^6 against ||P0||_6^6 + C int_0^t ||P||_inf^12 ds, using
/// d/dt (P^6 v) = -(6 gamma - 1) P^6 v_t per unit mass.
inline PressureL6Report pressure_l6_monitor(const Trajectory& traj, double tol = 1e-9) {
  if (traj.size() < 2) throw std::invalid_argument("pressure monitor needs at least two levels");
  const auto& gas = traj.gas();
  const double omega = WeightedNormConvention::for_dimension(traj.state(0).dim).omega;
  const double g6 = 6.0 * gas.gamma - 1.0;
  auto q = [&](double v) { return std::pow(gas.pressure(v), 6.0) * v; };

  PressureL6Report rep;
  std::vector<double> sup12(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& st = traj.state(k);
    double l6 = 0.0, pmax = 0.0;
    for (double v : st.v) {
      l6 += q(v) * st.dm;
      pmax = std::max(pmax, gas.pressure(v));
    }
    rep.times.push_back(st.t);
    rep.l6_sixth.push_back(omega * l6);
    sup12[k] = std::pow(pmax, 12.0);
  }

  double worst_residual = 0.0, scale = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const auto& a = traj.state(k);
    const auto& b = traj.state(k + 1);
    const double dt = b.t - a.t;
    double flux = 0.0;
    for (std::size_t j = 0; j < a.cells(); ++j) {
      const double dv = b.v[j] - a.v[j];
      const double pa6 = std::pow(gas.pressure(a.v[j]), 6.0);
      const double pb6 = std::pow(gas.pressure(b.v[j]), 6.0);
      // Mean value theorem: |q(b) - q(a)| <= g6 max(P^6) |dv|.
      flux += omega * g6 * std::max(pa6, pb6) * std::abs(dv / dt) * a.dm;
      const double res = (q(b.v[j]) - q(a.v[j])) / dt + g6 * 0.5 * (pa6 + pb6) * dv / dt;
      worst_residual = std::max(worst_residual, std::abs(res));
      scale = std::max(scale, g6 * pa6 * std::abs(dv / dt));
    }
    rep.fitted_constant = std::max(rep.fitted_constant, flux / sup12[k]);
  }
  rep.transport_residual = scale > 0.0 ? worst_residual / scale : worst_residual;

  double integral = 0.0;
  rep.majorant.push_back(rep.l6_sixth[0]);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj.time(k) - traj.time(k - 1);
    integral += dt * sup12[k - 1];
    rep.majorant.push_back(rep.l6_sixth[0] + rep.fitted_constant * integral);
  }
  for (std::size_t k = 0; k < traj.size(); ++k)
    if (rep.l6_sixth[k] > rep.majorant[k] * (1.0 + tol)) rep.holds = false;
  return rep;
}

}  // namespace radlab
