#pragma once

// Caffarelli-Kohn-Nirenberg interpolation inequality
//   || |x|^gamma u ||_r <= C || |x|^alpha Du ||_p^a || |x|^beta u ||_q^(1-a)
// exponent feasibility, and empirical lower estimates of the constant C in
// one dimension.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace radlab {

struct CknParams {
  int n = 1;
  double p = 2.0, q = 2.0, r = 2.0;
  double a = 0.0;
  double alpha = 0.0, beta = 0.0, sigma = 0.0, gamma = 0.0;

  /// The instance used for the density bound: n=1, gamma=2/3, r=6,
  /// alpha=beta=1, sigma=1/2, p=q=2, a=2/3.
  static CknParams density_instance() {
    return {1, 2.0, 2.0, 6.0, 2.0 / 3.0, 1.0, 1.0, 0.5, 2.0 / 3.0};
  }
};

enum class CknCondition { balance, sigma_low, sigma_high, constraints };

inline std::string_view to_string(CknCondition c) {
  switch (c) {
    case CknCondition::balance: return "balance";
    case CknCondition::sigma_low: return "sigma_low";
    case CknCondition::sigma_high: return "sigma_high";
    case CknCondition::constraints: return "constraints";
  }
  return "?";
}

struct FeasibilityVerdict {
  bool feasible = true;
  std::vector<CknCondition> violated_conditions;

  bool violates(CknCondition c) const {
    return std::find(violated_conditions.begin(), violated_conditions.end(), c) !=
           violated_conditions.end();
  }
};

/// Checks every exponent relation; equalities use an absolute tolerance.
inline FeasibilityVerdict feasibility(const CknParams& k, double tol = 1e-12) {
  for (double x : {k.p, k.q, k.r, k.a, k.alpha, k.beta, k.sigma, k.gamma})
    if (!std::isfinite(x)) throw std::invalid_argument("CKN exponents must be finite");
  if (k.n < 1) throw std::invalid_argument("CKN dimension must be >= 1");

  const double n = k.n;
  const double grad_level = 1.0 / k.p + (k.alpha - 1.0) / n;
  const double base_level = 1.0 / k.q + k.beta / n;
  const double target_level = 1.0 / k.r + k.gamma / n;

  FeasibilityVerdict v;
  auto fail = [&](CknCondition c) {
    v.feasible = false;
    v.violated_conditions.push_back(c);
  };

  const double mixed = k.a * grad_level + (1.0 - k.a) * base_level;
  if (std::abs(target_level - mixed) > tol) fail(CknCondition::balance);

  if (k.a > 0.0 && k.alpha - k.sigma < -tol) fail(CknCondition::sigma_low);

  if (k.a > 0.0 && std::abs(grad_level - target_level) <= tol && k.alpha - k.sigma > 1.0 + tol)
    fail(CknCondition::sigma_high);

  const bool ranges = k.p >= 1.0 && k.q >= 1.0 && k.r > 0.0 && k.a >= 0.0 && k.a <= 1.0;
  const bool positive = grad_level > 0.0 && base_level > 0.0 && target_level > 0.0;
  const bool interpolated = std::abs(k.gamma - (k.a * k.sigma + (1.0 - k.a) * k.beta)) <= tol;
  if (!(ranges && positive && interpolated)) fail(CknCondition::constraints);
  return v;
}

/// Samples u(x_i) at x_i = i L / K, i = 0..K.
struct SampledLine {
  double length = 1.0;
  std::vector<double> values;

  std::size_t intervals() const { return values.size() - 1; }
  double spacing() const { return length / static_cast<double>(intervals()); }
  double x(std::size_t i) const { return spacing() * static_cast<double>(i); }
};

class UndefinedRatio : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

// Fourth-order central differences, second-order one-sided near the ends.
inline std::vector<double> line_derivative(const SampledLine& u) {
  const auto& f = u.values;
  const std::size_t m = f.size();
  const double h = u.spacing();
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= 2 && i + 2 < m) {
      d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    } else if (i == 0) {
      d[i] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    } else if (i + 1 == m) {
      d[i] = (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * h);
    } else {
      d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
  }
  return d;
}

// (int_0^L |x^w f|^s dx)^{1/s} by the trapezoid rule.  Samples where f
// vanishes contribute nothing, which keeps negative weights finite at x=0.
inline double weighted_line_norm(const SampledLine& grid, const std::vector<double>& f, double w,
                                 double s) {
  const std::size_t m = f.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (f[i] == 0.0) continue;
    const double term = std::pow(std::pow(grid.x(i), w) * std::abs(f[i]), s);
    sum += (i == 0 || i + 1 == m) ? 0.5 * term : term;
  }
  return std::pow(sum * grid.spacing(), 1.0 / s);
}

}  // namespace detail

/// LHS / RHS of the inequality for a one-dimensional test function.
inline double empirical_ratio(const CknParams& k, const SampledLine& u) {
  if (k.n != 1) throw std::invalid_argument("empirical CKN ratios are one-dimensional");
  if (!feasibility(k).feasible) throw std::invalid_argument("CKN exponents are infeasible");
  if (u.values.size() < 5) throw std::invalid_argument("test function needs at least 5 samples");

  const auto du = detail::line_derivative(u);
  const double lhs = detail::weighted_line_norm(u, u.values, k.gamma, k.r);
  const double grad = detail::weighted_line_norm(u, du, k.alpha, k.p);
  const double base = detail::weighted_line_norm(u, u.values, k.beta, k.q);
  if (base == 0.0 || (k.a > 0.0 && grad == 0.0))
    throw UndefinedRatio("CKN ratio undefined: vanishing denominator");
  const double rhs = std::pow(grad, k.a) * std::pow(base, 1.0 - k.a);
  const double ratio = lhs / rhs;
  if (!std::isfinite(ratio)) throw UndefinedRatio("CKN ratio is not finite");
  return ratio;
}

/// Largest empirical ratio; undefined members are skipped.
inline double sup_ratio_over_corpus(const CknParams& k, const std::vector<SampledLine>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("empty CKN corpus");
  double best = -1.0;
  for (const auto& u : corpus) {
    try {
      best = std::max(best, empirical_ratio(k, u));
    } catch (const UndefinedRatio&) {
    }
  }
  if (best < 0.0) throw UndefinedRatio("every corpus member has an undefined ratio");
  return best;
}

/// Smooth test function on (0, L]: a sum of Gaussian bumps and compactly
/// supported polynomial bumps (x-l)^4 (h-x)^4, optionally dilated.
class CknTestFunction {
 public:
  struct Bump {
    bool gaussian;
    double center;  // gaussian: center; polynomial: left end
    double width;   // gaussian: std scale; polynomial: right end
    double coefficient;
  };

  explicit CknTestFunction(std::vector<Bump> bumps, double dilation = 1.0)
      : bumps_(std::move(bumps)), dilation_(dilation) {}

  static CknTestFunction gaussian(double center, double sharpness) {
    return CknTestFunction({{true, center, 1.0 / std::sqrt(sharpness), 1.0}});
  }

  /// 1 to 3 bumps supported well inside (0, L).
  template <class Rng>
  static CknTestFunction random(double length, Rng& rng) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0), coef(-1.0, 1.0);
    std::vector<Bump> bumps;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
      if (unit(rng) < 0.5) {
        const double c = length * (0.35 + 0.3 * unit(rng));
        const double w = length * (0.03 + 0.04 * unit(rng));
        bumps.push_back({true, c, w, coef(rng)});
      } else {
        const double lo = length * (0.1 + 0.3 * unit(rng));
        const double hi = lo + length * (0.15 + 0.35 * unit(rng));
        bumps.push_back({false, lo, hi, coef(rng)});
      }
    }
    return CknTestFunction(std::move(bumps));
  }

  double operator()(double x) const {
    const double s = dilation_ * x;
    double sum = 0.0;
    for (const auto& b : bumps_) {
      if (b.gaussian) {
        const double z = (s - b.center) / b.width;
        sum += b.coefficient * std::exp(-z * z);
      } else if (s > b.center && s < b.width) {
        const double l = (s - b.center) / (b.width - b.center), r = 1.0 - l;
        sum += b.coefficient * 256.0 * std::pow(l * r, 4);
      }
    }
    return sum;
  }

  /// x -> u(lambda x).
  CknTestFunction dilated(double lambda) const { return CknTestFunction(bumps_, dilation_ * lambda); }

  SampledLine sample(double length, std::size_t intervals) const {
    SampledLine out{length, std::vector<double>(intervals + 1)};
    for (std::size_t i = 0; i <= intervals; ++i) out.values[i] = (*this)(out.x(i));
    return out;
  }

 private:
  std::vector<Bump> bumps_;
  double dilation_;
};

inline std::vector<CknTestFunction> ckn_corpus(std::size_t count, double length,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CknTestFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(CknTestFunction::random(length, rng));
  return out;
}

inline std::vector<SampledLine> sample_corpus(const std::vector<CknTestFunction>& corpus,
                                              double length, std::size_t intervals) {
  std::vector<SampledLine> out;
  out.reserve(corpus.size());
  for (const auto& f : corpus) out.push_back(f.sample(length, intervals));
  return out;
}

/// One perturbation of the density instance that breaks exactly one
/// condition, tagged with the condition it breaks.
struct CknPerturbation {
  CknParams params;
  CknCondition expected;
};

/// `count` perturbations cycling through the four conditions.
inline std::vector<CknPerturbation> single_condition_perturbations(std::size_t count,
                                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CknPerturbation> out;
  const auto base = CknParams::density_instance();
  for (std::size_t i = 0; i < count; ++i) {
    CknParams k = base;
    CknCondition tag = static_cast<CknCondition>(i % 4);
    switch (tag) {
      case CknCondition::balance: {
        // Move only r; any r != 6 breaks the balance.
        const double f = unit(rng) < 0.5 ? 0.4 + 0.5 * unit(rng) : 1.2 + 1.5 * unit(rng);
        k.r = base.r * f;
        break;
      }
      case CknCondition::constraints: {
        // Move only sigma, away from the interpolated value 1/2.
        const double s = unit(rng) < 0.5 ? 0.4 * unit(rng) : 0.6 + 0.4 * unit(rng);
        k.sigma = s;
        break;
      }
      case CknCondition::sigma_low: {
        // sigma > alpha with everything else consistent.
        k.a = 1.0 / 3.0;
        k.p = k.q = 1.0;
        k.alpha = 0.2 + 0.8 * unit(rng);
        k.sigma = k.alpha + 0.1 + 1.4 * unit(rng);
        k.beta = unit(rng);
        k.gamma = k.a * k.sigma + (1.0 - k.a) * k.beta;
        k.r = 1.0 / ((1.0 - k.a) - k.a * (k.sigma - k.alpha));
        break;
      }
      case CknCondition::sigma_high: {
        // a = 1 on the critical line with alpha - sigma = 1 + d > 1.
        const double d = 0.1 + 0.9 * unit(rng);
        k.a = 1.0;
        k.p = k.q = 2.0;
        k.alpha = 0.6 + 1.4 * unit(rng);
        k.beta = 1.0;
        k.sigma = k.gamma = k.alpha - 1.0 - d;
        k.r = 1.0 / (0.5 + d);
        break;
      }
    }
    out.push_back({k, tag});
  }
  return out;
}

inline std::string describe(const CknParams& k) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "n=%d p=%.17g q=%.17g r=%.17g a=%.17g alpha=%.17g beta=%.17g sigma=%.17g "
                "gamma=%.17g",
                k.n, k.p, k.q, k.r, k.a, k.alpha, k.beta, k.sigma, k.gamma);
  return buf;
}

}  // namespace radlab
