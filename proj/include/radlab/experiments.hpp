#pragma once

// Runs built from a RunConfig: monitored simulations, twin runs,
// self-convergence studies, and the corpus reports for the estimates.

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "radlab/ckn.hpp"
#include "radlab/config.hpp"
#include "radlab/corpus.hpp"
#include "radlab/density_bounds.hpp"
#include "radlab/diagnostics.hpp"
#include "radlab/sharp_estimates.hpp"
#include "radlab/uniqueness.hpp"

namespace radlab {

struct InitialData {
  RadialProfile rho;
  RadialProfile u;
};

inline InitialData initial_profiles(const RunConfig& c) {
  auto g = RadialGrid::uniform(c.N, c.R, c.profile_grid);
  if (c.profile == ProfileFamily::Constant)
    return {RadialProfile::constant(g, c.rho0), RadialProfile::constant(g, 0.0)};
  const double R = c.R;
  auto rho = RadialProfile::sample(g, [&](double r) {
    const double x = 1.0 - (r / R) * (r / R);
    return c.rho0 * (1.0 + c.rho_amp * x * x);
  });
  auto u = RadialProfile::sample(g, [&](double r) { return c.u_amp * r * (R - r) / (R * R); });
  return {rho, u};
}

inline LagrangianState initial_state(const RunConfig& c) {
  const auto d = initial_profiles(c);
  return init(d.rho, d.u, c.gas, c.J);
}

/// The first hard assertion that failed during a run.
struct InvariantFailure {
  std::string name;
  std::string detail;
  double t = 0.0;
};

struct SimulationResult {
  std::vector<DiagnosticsRecord> records;
  std::optional<Trajectory> trajectory;
  std::size_t steps = 0;
  double e0 = 0.0;
  double max_energy_increase = 0.0;  // max_k (E_{k+1} - E_k) / E0
  double energy_balance_drift = 0.0;  // (E + dissipated - E0) / E0 at the end
  double max_repr_residual = 0.0;
  double max_factorization_residual = 0.0;
  double max_closed_form_residual = 0.0;
  double max_volume_error = 0.0;
  double max_geometry_error = 0.0;
  double max_wall_error = 0.0;
  std::optional<PressureL6Report> l6;
  std::optional<BetaMonitorReport> beta;
  std::optional<InvariantFailure> failure;

  bool passed() const { return !failure; }
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline bool all_finite(const DiagnosticsRecord& d) {
  for (double x : {d.t, d.E, d.Phi, d.beta, d.div_sup, d.grad_sup, d.P_l2, d.P_l6, d.G_l2,
                   d.rho_min, d.rho_max, d.sharp_lower_margin, d.sharp_upper_margin,
                   d.vol_constraint_err, d.repr_residual})
    if (!std::isfinite(x)) return false;
  return true;
}

// Number of equal steps covering [0, t_end] with dt no larger than `dt`.
inline std::size_t step_count(double t_end, double dt) {
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace detail

/// Runs the configured simulation and monitors every hard invariant.
/// Diagnostics are recorded at t = 0, at each output interval and at t_end.
inline SimulationResult simulate(const RunConfig& c, bool keep_trajectory = true) {
  SimulationResult res;
  auto fail = [&](const char* name, const std::string& detail, double t) {
    if (!res.failure) res.failure = InvariantFailure{name, detail, t};
  };
  const auto s0 = initial_state(c);
  const auto& gas = c.gas;
  Trajectory traj(s0, gas);
  res.e0 = energy(s0, gas);
  const double vol_scale = std::pow(c.R, c.N);

  std::size_t fixed_steps = 0;
  double fixed_dt = 0.0;
  if (c.dt > 0.0) {
    fixed_steps = detail::step_count(c.t_end, c.dt);
    fixed_dt = c.t_end / static_cast<double>(fixed_steps);
  }

  auto record = [&](std::size_t k) {
    const auto& st = traj.state(k);
    auto d = diagnostics(st, gas);
    d.repr_residual = representation_residuals(traj, k, c.repr_tol).max_residual();
    if (!detail::all_finite(d)) fail("finite_diagnostics", "non-finite diagnostics field", st.t);
    if (!verify_linfty_bounds(eulerian_view(st).u).satisfied())
      fail("sharp_gradient_bound", detail::fmt("margins %.3e / %.3e", d.sharp_lower_margin,
                                               d.sharp_upper_margin),
           st.t);
    const auto db = density_bound_monitor(traj, st.t);
    if (!db.satisfied)
      fail("density_bound", detail::fmt("max rho %.17g exceeds %.17g", db.rho_max, db.rhs), st.t);
    res.records.push_back(d);
  };
  record(0);

  double next_output = c.output_interval;
  double prev_energy = res.e0;
  for (std::size_t k = 0;; ++k) {
    const auto& cur = traj.back();
    const double remaining = c.t_end - cur.t;
    if (fixed_steps ? k >= fixed_steps : remaining <= 1e-12 * c.t_end) break;
    double dt = fixed_dt;
    if (!fixed_steps) dt = std::min(stability_limit(cur, gas, c.cfl), remaining);
    try {
      traj.append(step(cur, gas, dt, c.splitting, c.cfl));
    } catch (const PositivityLoss& e) {
      fail("positivity", e.what(), cur.t);
      break;
    } catch (const StabilityViolation& e) {
      fail("stability_limit", e.what(), cur.t);
      break;
    } catch (const TridiagonalFailure& e) {
      fail("tridiagonal_solve", e.what(), cur.t);
      break;
    }
    ++res.steps;
    const std::size_t level = traj.size() - 1;
    const auto& st = traj.back();

    const double e = energy(st, gas);
    res.max_energy_increase = std::max(res.max_energy_increase, (e - prev_energy) / res.e0);
    if (e - prev_energy > c.energy_tol * res.e0)
      fail("energy_inequality", detail::fmt("energy rose by %.3e E0", (e - prev_energy) / res.e0),
           st.t);
    prev_energy = e;

    const auto vol = verify_volume_constraint(st, c.volume_tol);
    res.max_volume_error = std::max(res.max_volume_error, vol.relative_error);
    if (!vol.satisfied) fail("volume_constraint", detail::fmt("relative error %.3e", vol.relative_error), st.t);

    const double geo = geometric_consistency_error(st) / vol_scale;
    res.max_geometry_error = std::max(res.max_geometry_error, geo);
    if (geo > 1e-10) fail("geometric_consistency", detail::fmt("error %.3e", geo), st.t);

    const double wall = std::abs(st.radius() - c.R) / c.R;
    res.max_wall_error = std::max(res.max_wall_error, wall);
    if (wall > 1e-8) fail("wall_anchoring", detail::fmt("|r_J - R| / R = %.3e", wall), st.t);

    const auto rep = representation_residuals(traj, level, c.repr_tol);
    res.max_repr_residual = std::max(res.max_repr_residual, rep.max_residual());
    res.max_factorization_residual =
        std::max(res.max_factorization_residual, rep.factorization_residual);
    res.max_closed_form_residual = std::max(res.max_closed_form_residual, rep.closed_form_residual);
    if (!rep.satisfied)
      fail("representation", detail::fmt("residual %.3e in cell %.0f", rep.max_residual(),
                                         static_cast<double>(rep.worst_cell)),
           st.t);

    const bool last = fixed_steps ? k + 1 == fixed_steps : c.t_end - st.t <= 1e-12 * c.t_end;
    if (last || c.output_interval == 0.0 || st.t >= next_output - 1e-12 * c.t_end) {
      record(level);
      while (c.output_interval > 0.0 && next_output <= st.t + 1e-12 * c.t_end)
        next_output += c.output_interval;
    }
  }

  const auto& fin = traj.back();
  res.energy_balance_drift = (energy(fin, gas) + fin.dissipated - res.e0) / res.e0;
  const auto audit = traj.reintegrate();
  if (!audit.consistent)
    fail("accumulator_audit", detail::fmt("relative error %.3e", audit.max_relative_error), fin.t);
  if (traj.size() >= 2) res.l6 = pressure_l6_monitor(traj);
  res.beta = beta_monitor(res.records);
  if (keep_trajectory) res.trajectory.emplace(std::move(traj));
  return res;
}

struct UniquenessResult {
  std::optional<TwinResult> twin;
  double eps = 0.0;
  double analytic_constant = 0.0;
  GronwallReport gronwall;
  LipschitzReport worst_lipschitz;
  double weight_integral = 0.0;  // sum dt ||(r^{N-1}u2)_y||_inf^2
  std::optional<InvariantFailure> failure;

  bool passed() const { return !failure; }
};

/// Twin run of the configured data against the mass-preserving density
/// perturbation of size c.delta.
inline UniquenessResult uniqueness_run(const RunConfig& c) {
  UniquenessResult res;
  const auto d = initial_profiles(c);
  auto s1 = init(d.rho, d.u, c.gas, c.J);
  auto s2 = init(perturb_density(d.rho, c.delta), d.u, c.gas, c.J);
  TwinOptions opt{c.t_end, c.cfl, c.splitting, 0};
  if (c.dt > 0.0) opt.steps = detail::step_count(c.t_end, c.dt);
  try {
    res.twin.emplace(twin_run(std::move(s1), std::move(s2), c.gas, opt));
  } catch (const TwinRunAborted& e) {
    res.failure = InvariantFailure{"twin_run", e.what(), 0.0};
    return res;
  }
  const auto& tw = *res.twin;
  res.eps = c.gas.kappa() / (4.0 * tw.v_max);
  res.analytic_constant = analytic_gronwall_constant(c.gas, res.eps, tw.v_min, tw.v_max);
  if (tw.records.size() >= 2) {
    res.gronwall = gronwall_check(tw.records, res.analytic_constant);
    if (!res.gronwall.holds)
      res.failure = InvariantFailure{
          "gronwall", detail::fmt("fitted C %.6g exceeds analytic C %.6g",
                                  res.gronwall.fitted_constant, res.analytic_constant),
          tw.records[res.gronwall.worst_step].t};
  }
  for (std::size_t k = 1; k < tw.records.size(); ++k)
    res.weight_integral += tw.records[k].dt * (tw.records[k - 1].weight - 1.0);
  for (std::size_t k = 0; k < tw.first.size(); ++k) {
    const auto lip = pressure_lipschitz_check(tw.first.state(k), tw.second.state(k), c.gas, tw.v_min);
    if (lip.max_ratio >= res.worst_lipschitz.max_ratio) res.worst_lipschitz = lip;
    if (!lip.satisfied && !res.failure)
      res.failure = InvariantFailure{"pressure_lipschitz",
                                     detail::fmt("ratio %.6g at cell %.0f", lip.max_ratio,
                                                 static_cast<double>(lip.witness_cell)),
                                     tw.first.time(k)};
  }
  return res;
}

/// Final state after `steps` equal steps of size t_end/steps at J cells.
inline LagrangianState run_fixed(RunConfig c, std::size_t cells, std::size_t steps) {
  c.J = cells;
  auto st = initial_state(c);
  const double dt = c.t_end / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) st = step(st, c.gas, dt, c.splitting, c.cfl);
  return st;
}

/// L^2(dy) distances of (v, u) on J cells to a reference on 4J cells: v
/// against the average of the four fine cells, u against the coincident
/// fine node.
inline std::pair<double, double> distance_to_reference(const LagrangianState& coarse,
                                                       const LagrangianState& fine) {
  const std::size_t jn = coarse.cells();
  if (fine.cells() != 4 * jn) throw std::invalid_argument("reference must have 4x the cells");
  double ev = 0.0, eu = 0.0;
  for (std::size_t j = 0; j < jn; ++j) {
    const double avg = 0.25 * (fine.v[4 * j] + fine.v[4 * j + 1] + fine.v[4 * j + 2] + fine.v[4 * j + 3]);
    ev += (coarse.v[j] - avg) * (coarse.v[j] - avg) * coarse.dm;
  }
  for (std::size_t j = 1; j < jn; ++j) {
    const double du = coarse.u[j] - fine.u[4 * j];
    eu += du * du * coarse.dm;
  }
  return {std::sqrt(ev), std::sqrt(eu)};
}

struct ConvergenceRow {
  std::size_t J = 0;
  std::size_t steps = 0;
  double dt = 0.0;
  double err_v = 0.0, err_u = 0.0;
  double order_v = NAN, order_u = NAN;  // against the previous row
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double min_order_v = INFINITY, min_order_u = INFINITY;

  bool passed(double required = 1.0) const {
    return rows.size() >= 2 && min_order_v >= required && min_order_u >= required;
  }
};

/// Levels J 2^l, dt / 2^l, each compared with its own (4J, dt/4) reference.
inline ConvergenceStudy convergence_study(const RunConfig& c, int levels = 2) {
  if (levels < 2) throw std::invalid_argument("a convergence study needs at least two levels");
  double dt0 = c.dt;
  if (!(dt0 > 0.0)) dt0 = 0.8 * stability_limit(initial_state(c), c.gas, c.cfl);
  const std::size_t n0 = detail::step_count(c.t_end, dt0);
  ConvergenceStudy study;
  for (int l = 0; l < levels; ++l) {
    const std::size_t J = c.J << l, n = n0 << l;
    const auto coarse = run_fixed(c, J, n);
    const auto fine = run_fixed(c, 4 * J, 4 * n);
    ConvergenceRow row;
    row.J = J;
    row.steps = n;
    row.dt = c.t_end / static_cast<double>(n);
    std::tie(row.err_v, row.err_u) = distance_to_reference(coarse, fine);
    if (l > 0) {
      const auto& prev = study.rows.back();
      row.order_v = std::log2(prev.err_v / row.err_v);
      row.order_u = std::log2(prev.err_u / row.err_u);
      study.min_order_v = std::min(study.min_order_v, row.order_v);
      study.min_order_u = std::min(study.min_order_u, row.order_u);
    }
    study.rows.push_back(row);
  }
  return study;
}

/// Corpus check of the gradient bounds in one dimension.
struct EstimatesReport {
  int dim = 3;
  std::size_t count = 0;
  std::size_t linfty_failures = 0;
  double min_lower_ratio = INFINITY;  // ||grad U||_inf / ||div U||_inf
  double max_upper_ratio = 0.0;
  std::vector<double> exponents;
  std::vector<std::size_t> ratio_failures, derivative_failures;
  std::vector<double> worst_ratio_line, worst_derivative_line;  // max lhs/rhs
  double witness_lower_ratio = 0.0;    // u = r: ||grad U|| / ||div U||
  double witness_wall_ratio = 0.0;     // u = r at r = R, ratio line, p = exponents[0]
  std::vector<double> reconstruction_errors;  // worst over corpus at K, 2K, 4K
  double reconstruction_order = 0.0;          // min over corpus and refinements

  bool linfty_ok() const { return linfty_failures == 0; }
  bool lp_ok() const {
    for (std::size_t i = 0; i < exponents.size(); ++i)
      if (ratio_failures[i] || derivative_failures[i]) return false;
    return true;
  }
};

inline EstimatesReport estimates_report(int dim, std::size_t count, std::uint64_t seed,
                                        std::size_t intervals = 256,
                                        std::vector<double> exponents = {2.0, 6.0},
                                        std::size_t reconstruction_count = 100) {
  EstimatesReport rep;
  rep.dim = dim;
  rep.count = count;
  rep.exponents = exponents;
  rep.ratio_failures.assign(exponents.size(), 0);
  rep.derivative_failures.assign(exponents.size(), 0);
  rep.worst_ratio_line.assign(exponents.size(), 0.0);
  rep.worst_derivative_line.assign(exponents.size(), 0.0);
  auto grid = RadialGrid::uniform(dim, 1.0, intervals);
  const auto corpus = smooth_field_corpus(count, 1.0, seed);
  for (const auto& f : corpus) {
    const auto u = f.sample(grid);
    const auto b = verify_linfty_bounds(u);
    if (!b.satisfied()) ++rep.linfty_failures;
    if (b.upper.rhs > 0.0) {
      const double div_sup = b.upper.rhs / (2.0 + 1.0 / dim);
      rep.min_lower_ratio = std::min(rep.min_lower_ratio, b.upper.lhs / div_sup);
      rep.max_upper_ratio = std::max(rep.max_upper_ratio, b.upper.lhs / div_sup);
    }
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      const auto lp = pointwise_lp_bound(u, exponents[i]);
      if (!lp.ratio.satisfied) ++rep.ratio_failures[i];
      if (!lp.derivative.satisfied) ++rep.derivative_failures[i];
      rep.worst_ratio_line[i] = std::max(rep.worst_ratio_line[i], lp.ratio.ratio());
      rep.worst_derivative_line[i] = std::max(rep.worst_derivative_line[i], lp.derivative.ratio());
    }
  }
  const auto lin = RadialProfile::sample(grid, [](double r) { return r; });
  const auto lb = verify_linfty_bounds(lin);
  rep.witness_lower_ratio = lb.lower.rhs / (lb.lower.lhs * dim);
  const auto wall = pointwise_lp_bound(lin, exponents.front());
  rep.witness_wall_ratio = wall.ratio.ratio();

  // Round trip u -> div -> u at K = 64, 128, 256.
  const std::size_t rc = std::min(reconstruction_count, corpus.size());
  rep.reconstruction_errors.assign(3, 0.0);
  rep.reconstruction_order = INFINITY;
  for (std::size_t m = 0; m < rc; ++m) {
    double err[3];
    for (int l = 0; l < 3; ++l) {
      auto g = RadialGrid::uniform(dim, 1.0, std::size_t{64} << l);
      const auto u = corpus[m].sample(g);
      const auto back = reconstruct_u_from_div(divergence(u));
      err[l] = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) err[l] = std::max(err[l], std::abs(back[i] - u[i]));
      rep.reconstruction_errors[l] = std::max(rep.reconstruction_errors[l], err[l]);
    }
    // Fields reproduced to roundoff carry no order information.
    if (err[0] < 1e-12) continue;
    for (int l = 0; l < 2; ++l)
      rep.reconstruction_order = std::min(rep.reconstruction_order, std::log2(err[l] / err[l + 1]));
  }
  return rep;
}

struct CknReport {
  CknParams params;
  FeasibilityVerdict verdict;
  std::size_t perturbations = 0;
  std::size_t misclassified = 0;
  std::optional<double> sup_ratio, sup_ratio_refined;
};

inline CknReport ckn_report(const CknParams& k, std::uint64_t seed, std::size_t perturbations,
                            std::size_t corpus_size) {
  CknReport rep;
  rep.params = k;
  rep.verdict = feasibility(k);
  rep.perturbations = perturbations;
  for (const auto& p : single_condition_perturbations(perturbations, seed)) {
    const auto v = feasibility(p.params);
    if (v.feasible || v.violated_conditions.size() != 1 || !v.violates(p.expected))
      ++rep.misclassified;
  }
  if (corpus_size > 0 && rep.verdict.feasible && k.n == 1) {
    const auto corpus = ckn_corpus(corpus_size, 2.0, seed);
    rep.sup_ratio = sup_ratio_over_corpus(k, sample_corpus(corpus, 2.0, 2000));
    rep.sup_ratio_refined = sup_ratio_over_corpus(k, sample_corpus(corpus, 2.0, 4000));
  }
  return rep;
}

// CSV output.  Numbers use %.17g so identical runs give identical bytes.

inline const char* diagnostics_csv_header() {
  return "t,E,Phi,beta,div_sup,grad_sup,P_l2,P_l6,G_l2,rho_min,rho_max,sharp_lower_margin,"
         "sharp_upper_margin,vol_constraint_err,repr_residual";
}

inline std::string csv_row(std::initializer_list<double> xs) {
  std::string out;
  char buf[40];
  bool first = true;
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, first ? "%.17g" : ",%.17g", x);
    out += buf;
    first = false;
  }
  return out;
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& recs) {
  os << diagnostics_csv_header() << '\n';
  for (const auto& d : recs)
    os << csv_row({d.t, d.E, d.Phi, d.beta, d.div_sup, d.grad_sup, d.P_l2, d.P_l6, d.G_l2,
                   d.rho_min, d.rho_max, d.sharp_lower_margin, d.sharp_upper_margin,
                   d.vol_constraint_err, d.repr_residual})
       << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride = 1) {
  os << "step,t,node,y,r,u,cell_v\n";
  char buf[200];
  for (std::size_t k = 0; k < traj.size(); k += std::max<std::size_t>(stride, 1)) {
    const auto& st = traj.state(k);
    for (std::size_t j = 0; j <= st.cells(); ++j) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%.17g,%.17g,%.17g,%.17g\n", k, st.t, j,
                    st.dm * static_cast<double>(j), st.r[j], st.u[j],
                    j < st.cells() ? st.v[j] : NAN);
      os << buf;
    }
  }
}

inline const char* diff_csv_header() {
  return "t,dt,lambda_sq,theta_sq,flux_sq,weight,gronwall_rhs";
}

inline void write_diff_csv(std::ostream& os, const std::vector<DiffRecord>& recs) {
  os << diff_csv_header() << '\n';
  for (const auto& d : recs)
    os << csv_row({d.t, d.dt, d.lambda_sq, d.theta_sq, d.flux_sq, d.weight, d.gronwall_rhs}) << '\n';
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceStudy& s) {
  os << "J,steps,dt,err_v,err_u,order_v,order_u\n";
  char buf[200];
  for (const auto& r : s.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.J, r.steps, r.dt,
                  r.err_v, r.err_u, r.order_v, r.order_u);
    os << buf;
  }
}

}  // namespace radlab
