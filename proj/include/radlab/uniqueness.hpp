#pragma once

// Two solutions of v_t = (r^{N-1}u)_y advanced with one shared dt sequence,
// and the discrete Gronwall mechanics behind uniqueness.  With
// Lambda = v1 - v2 and Theta = u1 - u2, y = ||Lambda||^2 + ||Theta||^2 obeys
//   dy/dt <= C lambda(t) y,   lambda = 1 + ||(r^{N-1}u2)_y||_inf^2,
// once eps < kappa/(3 vmax) lets the dissipation absorb the eps terms.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "radlab/density_bounds.hpp"
#include "radlab/lagrangian_solver.hpp"

namespace radlab {

struct DiffRecord {
  double t = 0.0;
  double dt = 0.0;               // step that produced this level (0 at t = 0)
  double lambda_sq = 0.0;        // ||Lambda||^2_{L^2(dy)}
  double theta_sq = 0.0;         // ||Theta||^2_{L^2(dy)}
  double flux_sq = 0.0;          // ||(r^{N-1}u1 - r^{N-1}u2)_y||^2_{L^2(dy)}
  double weight = 1.0;           // 1 + ||(r^{N-1}u2)_y||_inf^2 at this level
  double gronwall_rhs = 0.0;     // y0 exp(C sum dt weight) with the analytic C

  double y() const { return lambda_sq + theta_sq; }
};

class TwinRunAborted : public SolverError {
 public:
  TwinRunAborted(int run, const std::string& what)
      : SolverError("run " + std::to_string(run) + " aborted: " + what), run_(run) {}
  int run() const { return run_; }

 private:
  int run_;
};

struct TwinOptions {
  double t_end = 0.1;
  double cfl = 0.4;
  Splitting splitting = Splitting::FirstOrder;
  std::size_t steps = 0;  // fixed dt = t_end/steps when > 0
};

struct TwinResult {
  Trajectory first;
  Trajectory second;
  std::vector<DiffRecord> records;
  double v_min = 0.0, v_max = 0.0;  // over both runs and all levels
};

/// rho (1 + delta b) / (1 + delta bbar) with b = (1 - (r/R)^2)^2 and bbar
/// the rho-weighted mean of b, so the total mass is unchanged.
inline RadialProfile perturb_density(const RadialProfile& rho, double delta) {
  const auto& g = rho.grid();
  std::vector<double> b(g.size()), rb(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = 1.0 - (g.node(i) / g.radius()) * (g.node(i) / g.radius());
    b[i] = x * x;
    rb[i] = rho[i] * b[i];
  }
  const double mean = cumulative_moments(RadialProfile(rho.grid_ptr(), rb)).back() /
                      cumulative_moments(rho).back();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = rho[i] * (1.0 + delta * b[i]) / (1.0 + delta * mean);
  return {rho.grid_ptr(), std::move(out)};
}

inline DiffRecord diff_record(const LagrangianState& a, const LagrangianState& b, double dt) {
  if (a.cells() != b.cells() || std::abs(a.dm - b.dm) > 1e-12 * a.dm)
    throw std::invalid_argument("twin states must share the mass grid");
  DiffRecord d;
  d.t = b.t;
  d.dt = dt;
  const double dm = a.dm;
  for (std::size_t j = 0; j < a.cells(); ++j) {
    const double l = a.v[j] - b.v[j];
    d.lambda_sq += l * l * dm;
  }
  double sup = 0.0;
  for (std::size_t j = 0; j <= a.cells(); ++j) {
    const double th = a.u[j] - b.u[j];
    d.theta_sq += th * th * dm;
  }
  for (std::size_t j = 0; j < a.cells(); ++j) {
    const double fa = (a.area(j + 1) * a.u[j + 1] - a.area(j) * a.u[j]) / dm;
    const double fb = (b.area(j + 1) * b.u[j + 1] - b.area(j) * b.u[j]) / dm;
    d.flux_sq += (fa - fb) * (fa - fb) * dm;
    sup = std::max(sup, std::abs(fb));
  }
  d.weight = 1.0 + sup * sup;
  return d;
}

/// (1/(2 eps)) max(1 + C_p^2, kappa^2 / vmin^4) with C_p = a gamma vmin^{-gamma-1}.
inline double analytic_gronwall_constant(const GasParams& gas, double eps, double v_min,
                                         double v_max) {
  if (!(v_min > 0.0) || !(v_max >= v_min)) throw std::invalid_argument("need 0 < vmin <= vmax");
  if (!(eps > 0.0) || eps >= gas.kappa() / (3.0 * v_max))
    throw std::invalid_argument("eps must lie in (0, kappa/(3 vmax))");
  const double cp = gas.a * gas.gamma * std::pow(v_min, -gas.gamma - 1.0);
  const double k = gas.kappa();
  return std::max(1.0 + cp * cp, k * k / std::pow(v_min, 4)) / (2.0 * eps);
}

/// Advances both states with dt = min of the two stability limits (or the
/// fixed dt from options) and records the differences at every level.
inline TwinResult twin_run(LagrangianState s1, LagrangianState s2, const GasParams& gas,
                           const TwinOptions& opt) {
  if (s1.cells() != s2.cells() || std::abs(s1.mass() - s2.mass()) > 1e-12 * s1.mass())
    throw std::invalid_argument("twin runs need equal mass grids");
  TwinResult res{Trajectory(s1, gas), Trajectory(s2, gas), {}, INFINITY, 0.0};
  auto track = [&](const LagrangianState& s) {
    for (double v : s.v) {
      res.v_min = std::min(res.v_min, v);
      res.v_max = std::max(res.v_max, v);
    }
  };
  track(s1);
  track(s2);
  res.records.push_back(diff_record(s1, s2, 0.0));

  const double fixed = opt.steps > 0 ? opt.t_end / static_cast<double>(opt.steps) : 0.0;
  std::size_t k = 0;
  while (true) {
    const auto& a = res.first.back();
    const auto& b = res.second.back();
    const double remaining = opt.t_end - a.t;
    if (opt.steps > 0 ? k >= opt.steps : remaining <= 1e-12 * opt.t_end) break;
    double dt = fixed;
    if (opt.steps == 0) {
      dt = std::min(stability_limit(a, gas, opt.cfl), stability_limit(b, gas, opt.cfl));
      dt = std::min(dt, remaining);
    }
    LagrangianState n1, n2;
    try {
      n1 = step(a, gas, dt, opt.splitting, opt.cfl);
    } catch (const SolverError& e) {
      throw TwinRunAborted(1, e.what());
    }
    try {
      n2 = step(b, gas, dt, opt.splitting, opt.cfl);
    } catch (const SolverError& e) {
      throw TwinRunAborted(2, e.what());
    }
    track(n1);
    track(n2);
    res.records.push_back(diff_record(n1, n2, dt));
    res.first.append(std::move(n1));
    res.second.append(std::move(n2));
    ++k;
  }

  const double eps = gas.kappa() / (4.0 * res.v_max);
  const double c = analytic_gronwall_constant(gas, eps, res.v_min, res.v_max);
  const double y0 = res.records[0].y();
  double integral = 0.0;
  res.records[0].gronwall_rhs = y0;
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    integral += res.records[i].dt * res.records[i - 1].weight;
    res.records[i].gronwall_rhs = y0 * std::exp(c * integral);
  }
  return res;
}

struct GronwallReport {
  double fitted_constant = 0.0;  // smallest C with y_{k+1} <= y_k (1 + dt C weight_k)
  double tested_constant = 0.0;
  double implied_bound = 0.0;    // y_0 exp(sum dt C weight) with the tested C
  double final_value = 0.0;
  double weight_integral = 0.0;  // sum dt weight_k
  std::size_t worst_step = 0;
  bool holds = true;
};

/// Checks the discrete inequality for a given constant and reports the
/// smallest constant that makes it hold.
inline GronwallReport gronwall_check(const std::vector<DiffRecord>& records, double constant) {
  if (records.size() < 2) throw std::invalid_argument("Gronwall check needs at least two records");
  GronwallReport rep;
  rep.tested_constant = constant;
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    const double y0 = records[k].y(), y1 = records[k + 1].y();
    const double dt = records[k + 1].dt;
    const double w = records[k].weight;
    rep.weight_integral += dt * w;
    double needed = 0.0;
    if (y0 > 0.0)
      needed = (y1 / y0 - 1.0) / (dt * w);
    else if (y1 > 0.0)
      needed = INFINITY;
    if (needed > rep.fitted_constant) {
      rep.fitted_constant = needed;
      rep.worst_step = k;
    }
  }
  rep.final_value = records.back().y();
  rep.implied_bound = records.front().y() * std::exp(constant * rep.weight_integral);
  rep.holds = rep.fitted_constant <= constant * (1.0 + 1e-12);
  return rep;
}

struct LipschitzReport {
  double constant = 0.0;   // a gamma vmin^{-gamma-1}
  double max_ratio = 0.0;  // max |p1 - p2| / (C |Lambda|)
  std::size_t witness_cell = 0;
  bool satisfied = true;
};

/// |a v1^-gamma - a v2^-gamma| <= a gamma vmin^{-gamma-1} |v1 - v2| at every
/// cell; vmin defaults to the smaller minimum of the two states.
inline LipschitzReport pressure_lipschitz_check(const LagrangianState& s1,
                                                const LagrangianState& s2, const GasParams& gas,
                                                double v_min = 0.0) {
  if (s1.cells() != s2.cells()) throw std::invalid_argument("states must share the mass grid");
  if (v_min <= 0.0) {
    v_min = INFINITY;
    for (double v : s1.v) v_min = std::min(v_min, v);
    for (double v : s2.v) v_min = std::min(v_min, v);
  }
  LipschitzReport rep;
  rep.constant = gas.a * gas.gamma * std::pow(v_min, -gas.gamma - 1.0);
  for (std::size_t j = 0; j < s1.cells(); ++j) {
    const double lhs = std::abs(gas.pressure(s1.v[j]) - gas.pressure(s2.v[j]));
    const double rhs = rep.constant * std::abs(s1.v[j] - s2.v[j]);
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.witness_cell = j;
    }
  }
  rep.satisfied = rep.max_ratio <= 1.0 + 1e-12;
  return rep;
}

}  // namespace radlab
