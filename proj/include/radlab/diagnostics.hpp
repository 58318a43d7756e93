#pragma once

// Per-state diagnostics: energy, the quantities Phi and beta that drive the
// density bound, norms of P, grad U and the effective flux, and the margins
// of the sharp gradient bound.

#include <algorithm>
#include <cmath>
#include <vector>

#include "radlab/density_bounds.hpp"
#include "radlab/lagrangian_solver.hpp"
#include "radlab/sharp_estimates.hpp"

namespace radlab {

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double Phi = 0.0;   // 1 + max rho + ||P||_2^2 + ||grad U||_2^2
  double beta = 0.0;  // ||P||_2^2 + ||grad U||_2^2
  double div_sup = 0.0;
  double grad_sup = 0.0;
  double P_l2 = 0.0;
  double P_l6 = 0.0;
  double G_l2 = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double sharp_lower_margin = 0.0;
  double sharp_upper_margin = 0.0;
  double vol_constraint_err = 0.0;
  double repr_residual = 0.0;
  double grad_l2_sq = 0.0;  // ||grad U||_2^2
};

inline DiagnosticsRecord diagnostics(const LagrangianState& st, const GasParams& gas) {
  DiagnosticsRecord d;
  d.t = st.t;
  d.E = energy(st, gas);

  const auto view = eulerian_view(st);
  const auto div = divergence(view.u);
  d.div_sup = div.sup_abs();
  d.grad_sup = gradient_sup_norm(view.u);
  const double grad_l2 = lp_norm(gradient_frobenius(view.u), 2.0);
  d.grad_l2_sq = grad_l2 * grad_l2;

  const auto p = cell_pressure(st, gas);
  d.P_l2 = cell_lp_norm(st, p, 2.0);
  d.P_l6 = cell_lp_norm(st, p, 6.0);
  d.G_l2 = lp_norm(effective_flux(st, gas), 2.0);

  d.rho_min = INFINITY;
  for (std::size_t j = 0; j < st.cells(); ++j) {
    d.rho_min = std::min(d.rho_min, st.rho(j));
    d.rho_max = std::max(d.rho_max, st.rho(j));
  }
  d.beta = d.P_l2 * d.P_l2 + d.grad_l2_sq;
  d.Phi = 1.0 + d.rho_max + d.beta;

  const auto sharp = verify_linfty_bounds(view.u);
  d.sharp_lower_margin = sharp.lower.margin;
  d.sharp_upper_margin = sharp.upper.margin;
  d.vol_constraint_err = verify_volume_constraint(st).relative_error;
  return d;
}

struct BetaMonitorReport {
  double fitted_constant = 0.0;  // max_t beta(t) / exp(int_0^t integrand)
  std::vector<double> integral;  // int_0^t Phi (1 + ||grad U||_inf^2) ds
  bool finite = true;
};

/// beta(t) <= C exp(int_0^t chi(Phi) lambda ds) with the stand-ins
/// chi(x) = x and lambda = 1 + ||grad U||_inf^2; C is fitted.
inline BetaMonitorReport beta_monitor(const std::vector<DiagnosticsRecord>& records) {
  BetaMonitorReport rep;
  double integral = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (k > 0) {
      const auto& a = records[k - 1];
      const auto& b = records[k];
      auto f = [](const DiagnosticsRecord& r) { return r.Phi * (1.0 + r.grad_sup * r.grad_sup); };
      integral += 0.5 * (b.t - a.t) * (f(a) + f(b));
    }
    rep.integral.push_back(integral);
    rep.fitted_constant = std::max(rep.fitted_constant, records[k].beta / std::exp(integral));
  }
  rep.finite = std::isfinite(rep.fitted_constant) && std::isfinite(integral);
  return rep;
}

}  // namespace radlab
