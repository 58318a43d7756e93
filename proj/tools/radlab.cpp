// radlab: command line driver.  Exit codes: 0 all hard assertions passed,
// 1 an assertion failed (the first failing invariant is named), 2 usage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "radlab/experiments.hpp"

namespace fs = std::filesystem;
using namespace radlab;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path, const CLI::Option* seed_opt, std::uint64_t seed,
                      int refine) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  try {
    c = parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw UsageError(path + ": " + e.what());
  }
  if (seed_opt->count()) c.seed = seed;
  if (refine > 0) {
    c.J <<= refine;
    if (c.dt > 0.0) c.dt /= static_cast<double>(1 << refine);
  }
  return c;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(fs::path(dir) / name);
  if (!os) throw UsageError("cannot write " + (fs::path(dir) / name).string());
  return os;
}

int report_failure(const InvariantFailure& f) {
  std::printf("FAIL: %s at t=%.6g: %s\n", f.name.c_str(), f.t, f.detail.c_str());
  return kFail;
}

int cmd_simulate(const RunConfig& c, const std::string& out) {
  const auto res = simulate(c);
  {
    auto os = open_out(out, "diagnostics.csv");
    write_diagnostics_csv(os, res.records);
  }
  {
    auto os = open_out(out, "trajectory.csv");
    os << "t,node,y,r,u,cell_v\n";
    const auto& traj = *res.trajectory;
    char buf[200];
    for (const auto& d : res.records) {
      const auto& st = traj.state(traj.index_of(d.t));
      for (std::size_t j = 0; j <= st.cells(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g\n", st.t, j,
                      st.dm * static_cast<double>(j), st.r[j], st.u[j],
                      j < st.cells() ? st.v[j] : 0.0);
        os << buf;
      }
    }
  }
  std::printf("simulate: N=%d J=%zu steps=%zu t_end=%g splitting=%s\n", c.N, c.J, res.steps,
              c.t_end, to_string(c.splitting));
  std::printf("  E0=%.17g max step energy increase=%.3e E0, energy balance drift=%.3e E0\n", res.e0,
              res.max_energy_increase, res.energy_balance_drift);
  std::printf("  max residuals: representation=%.3e volume=%.3e geometry=%.3e wall=%.3e\n",
              res.max_repr_residual, res.max_volume_error, res.max_geometry_error,
              res.max_wall_error);
  if (res.l6)
    std::printf("  pressure L6 monitor: fitted C=%.6g holds=%s transport residual=%.3e\n",
                res.l6->fitted_constant, res.l6->holds ? "yes" : "no", res.l6->transport_residual);
  if (res.beta) std::printf("  beta monitor: fitted C=%.6g\n", res.beta->fitted_constant);
  if (res.failure) return report_failure(*res.failure);
  std::printf("PASS\n");
  return kPass;
}

int cmd_verify_estimates(std::uint64_t seed, std::size_t count, const std::string& out) {
  std::optional<InvariantFailure> first;
  std::ofstream os;
  if (!out.empty()) {
    os = open_out(out, "estimates.csv");
    os << "dim,check,p,count,failures,worst_ratio\n";
  }
  char buf[200];
  for (int dim : {2, 3}) {
    const auto rep = estimates_report(dim, count, seed + static_cast<std::uint64_t>(dim));
    std::printf("N=%d: %zu fields\n", dim, rep.count);
    std::printf("  sup-norm bounds: failures=%zu, grad/div ratio in [%.6f, %.6f] (bounds %.6f, %.6f)\n",
                rep.linfty_failures, rep.min_lower_ratio, rep.max_upper_ratio, 1.0 / dim,
                2.0 + 1.0 / dim);
    std::printf("  witness u=r: grad/div = %.15f, wall ratio = %.15f\n", rep.witness_lower_ratio,
                rep.witness_wall_ratio);
    if (!rep.linfty_ok() && !first) first = InvariantFailure{"sup_norm_gradient_bound", "N=" + std::to_string(dim), 0};
    if (os) {
      std::snprintf(buf, sizeof buf, "%d,sup_norm,inf,%zu,%zu,%.17g\n", dim, rep.count,
                    rep.linfty_failures, rep.max_upper_ratio / (2.0 + 1.0 / dim));
      os << buf;
    }
    for (std::size_t i = 0; i < rep.exponents.size(); ++i) {
      const double p = rep.exponents[i];
      std::printf("  p=%g: ratio line failures=%zu (worst lhs/rhs %.6f), derivative line failures=%zu (worst %.6f)\n",
                  p, rep.ratio_failures[i], rep.worst_ratio_line[i], rep.derivative_failures[i],
                  rep.worst_derivative_line[i]);
      if (rep.ratio_failures[i] && !first)
        first = InvariantFailure{"pointwise_lp_ratio", "N=" + std::to_string(dim), 0};
      if (rep.derivative_failures[i] && !first)
        first = InvariantFailure{"pointwise_lp_derivative",
                                 "N=" + std::to_string(dim) + " p=" + std::to_string(p) + ": " +
                                     std::to_string(rep.derivative_failures[i]) + " fields",
                                 0};
      if (os) {
        std::snprintf(buf, sizeof buf, "%d,lp_ratio,%g,%zu,%zu,%.17g\n%d,lp_derivative,%g,%zu,%zu,%.17g\n",
                      dim, p, rep.count, rep.ratio_failures[i], rep.worst_ratio_line[i], dim, p,
                      rep.count, rep.derivative_failures[i], rep.worst_derivative_line[i]);
        os << buf;
      }
    }
    std::printf("  reconstruction: errors %.3e %.3e %.3e, min order %.3f\n",
                rep.reconstruction_errors[0], rep.reconstruction_errors[1],
                rep.reconstruction_errors[2], rep.reconstruction_order);
    if (rep.reconstruction_order < 2.0 && !first)
      first = InvariantFailure{"reconstruction_order", "N=" + std::to_string(dim), 0};
  }
  if (first) {
    std::printf("FAIL: %s: %s\n", first->name.c_str(), first->detail.c_str());
    return kFail;
  }
  std::printf("PASS\n");
  return kPass;
}

int cmd_ckn(const CknParams& k, bool empirical, std::uint64_t seed) {
  const auto rep = ckn_report(k, seed, 0, empirical ? 100 : 0);
  std::printf("%s\n", describe(k).c_str());
  if (!rep.verdict.feasible) {
    std::string tags;
    for (auto c : rep.verdict.violated_conditions) tags += std::string(tags.empty() ? "" : ",") + std::string(to_string(c));
    std::printf("infeasible: violates %s\n", tags.c_str());
    std::printf("FAIL: ckn_feasibility: %s\n", tags.c_str());
    return kFail;
  }
  std::printf("feasible\n");
  if (rep.sup_ratio)
    std::printf("empirical sup ratio over 100 functions: %.6f (K=2000), %.6f (K=4000)\n",
                *rep.sup_ratio, *rep.sup_ratio_refined);
  return kPass;
}

int cmd_uniqueness(const RunConfig& c, const std::string& out) {
  const auto res = uniqueness_run(c);
  if (!res.twin) return report_failure(*res.failure);
  {
    auto os = open_out(out, "diff.csv");
    write_diff_csv(os, res.twin->records);
  }
  const auto& recs = res.twin->records;
  double sup = 0.0;
  for (const auto& d : recs) sup = std::max(sup, std::sqrt(d.lambda_sq) + std::sqrt(d.theta_sq));
  std::printf("uniqueness-run: delta=%g steps=%zu v in [%.6g, %.6g]\n", c.delta, recs.size() - 1,
              res.twin->v_min, res.twin->v_max);
  std::printf("  sup_t(|Lambda| + |Theta|) = %.6e\n", sup);
  std::printf("  Gronwall: fitted C=%.6g, analytic C(eps=%.4g)=%.6g, y_K=%.6e <= bound %.6e\n",
              res.gronwall.fitted_constant, res.eps, res.analytic_constant,
              res.gronwall.final_value, res.gronwall.implied_bound);
  std::printf("  sum dt |(r^{N-1}u)_y|_inf^2 = %.6g\n", res.weight_integral);
  std::printf("  pressure Lipschitz: worst ratio %.6f (cell %zu)\n", res.worst_lipschitz.max_ratio,
              res.worst_lipschitz.witness_cell);
  if (res.failure) return report_failure(*res.failure);
  std::printf("PASS\n");
  return kPass;
}

int cmd_convergence(const RunConfig& c, int refine, const std::string& out) {
  const auto study = convergence_study(c, std::max(2, refine + 1));
  {
    auto os = open_out(out, "convergence.csv");
    write_convergence_csv(os, study);
  }
  std::printf("%6s %7s %12s %12s %12s %8s %8s\n", "J", "steps", "dt", "err_v", "err_u", "ord_v", "ord_u");
  for (const auto& r : study.rows)
    std::printf("%6zu %7zu %12.4e %12.4e %12.4e %8.3f %8.3f\n", r.J, r.steps, r.dt, r.err_v,
                r.err_u, r.order_v, r.order_u);
  if (!study.passed()) {
    std::printf("FAIL: convergence_order: min order v=%.3f u=%.3f < 1\n", study.min_order_v,
                study.min_order_u);
    return kFail;
  }
  std::printf("PASS\n");
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radlab: radially symmetric compressible flow experiments"};
  app.require_subcommand(1);

  std::string config, out = "radlab_out";
  std::uint64_t seed = 0;
  int refine = 0;
  std::size_t count = 1000;
  bool empirical = false;
  CknParams ckn = CknParams::density_instance();

  auto add_run_opts = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", config, "run configuration file");
    if (need_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--refine", refine, "refinement level")->check(CLI::Range(0, 8));
    return sub->add_option("--seed", seed, "seed override");
  };

  auto* sim = app.add_subcommand("simulate", "run a monitored simulation");
  auto* sim_seed = add_run_opts(sim, true);
  auto* est = app.add_subcommand("verify-estimates", "corpus check of the gradient estimates");
  est->add_option("--seed", seed, "corpus seed");
  est->add_option("--count", count, "fields per dimension")->check(CLI::PositiveNumber);
  est->add_option("--out", out, "output directory");
  auto* ck = app.add_subcommand("ckn-check", "feasibility of a CKN exponent set");
  ck->add_option("--n", ckn.n);
  ck->add_option("--p", ckn.p);
  ck->add_option("--q", ckn.q);
  ck->add_option("--r", ckn.r);
  ck->add_option("--a", ckn.a);
  ck->add_option("--alpha", ckn.alpha);
  ck->add_option("--beta", ckn.beta);
  ck->add_option("--sigma", ckn.sigma);
  ck->add_option("--gamma", ckn.gamma);
  ck->add_flag("--empirical", empirical, "also estimate the sup ratio over a test corpus");
  ck->add_option("--seed", seed, "corpus seed");
  auto* uq = app.add_subcommand("uniqueness-run", "twin run and Gronwall check");
  auto* uq_seed = add_run_opts(uq, true);
  auto* cv = app.add_subcommand("convergence", "self-convergence study");
  auto* cv_seed = add_run_opts(cv, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(load_config(config, sim_seed, seed, refine), out);
    if (*est) return cmd_verify_estimates(seed, count, est->count("--out") ? out : "");
    if (*ck) return cmd_ckn(ckn, empirical, seed);
    if (*uq) return cmd_uniqueness(load_config(config, uq_seed, seed, refine), out);
    if (*cv) return cmd_convergence(load_config(config, cv_seed, seed, 0), refine, out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::printf("FAIL: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
