#pragma once

// Radial grids, weighted quadrature and the radial differential operators
// shared by every other module.
//
// A radially symmetric vector field U(x) = u(|x|) x/|x| on the ball B_R in
// R^N is represented by its radial component u sampled on a grid
// 0 = r_0 < r_1 < ... < r_K = R.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace radlab {

/// Surface constant omega_N = N |B_1| used by the weighted norm convention.
struct WeightedNormConvention {
  double omega;

  static WeightedNormConvention for_dimension(int dim) {
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    const double half = 0.5 * dim;
    return {2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half)};
  }
};

namespace detail {

// Derivative at x[i] of the quadratic through three neighbouring samples.
// Interior nodes use the centred stencil, the two ends a one-sided one.
inline double three_point_derivative(std::span<const double> x, std::span<const double> f,
                                     std::size_t i) {
  const std::size_t n = x.size();
  std::size_t a = 0;
  if (i == 0) {
    a = 0;
  } else if (i + 1 == n) {
    a = n - 3;
  } else {
    a = i - 1;
  }
  const double x0 = x[a], x1 = x[a + 1], x2 = x[a + 2];
  const double xi = x[i];
  // Lagrange basis derivatives evaluated at xi.
  const double l0 = ((xi - x1) + (xi - x2)) / ((x0 - x1) * (x0 - x2));
  const double l1 = ((xi - x0) + (xi - x2)) / ((x1 - x0) * (x1 - x2));
  const double l2 = ((xi - x0) + (xi - x1)) / ((x2 - x0) * (x2 - x1));
  return l0 * f[a] + l1 * f[a + 1] + l2 * f[a + 2];
}

inline std::vector<double> three_point_derivative(std::span<const double> x,
                                                  std::span<const double> f) {
  if (x.size() < 3 || x.size() != f.size())
    throw std::invalid_argument("derivative needs at least three matching samples");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = three_point_derivative(x, f, i);
  return d;
}

// Coefficients of a polynomial in t, lowest degree first.
using Poly = std::array<double, 6>;

inline Poly poly_mul_linear(const Poly& p, double c) {  // p(t) * (t + c)
  Poly out{};
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] += c * p[k];
    if (k + 1 < p.size()) out[k + 1] += p[k];
  }
  return out;
}

inline double poly_integral(const Poly& p, double len) {  // int_0^len p(t) dt
  double sum = 0.0, power = len;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sum += p[k] * power / static_cast<double>(k + 1);
    power *= len;
  }
  return sum;
}

// int_a^b L_m(s) s^{dim-1} ds for the Lagrange basis through three nodes,
// evaluated in the local variable t = s - a to avoid cancellation.
inline std::array<double, 3> quadratic_moments(const std::array<double, 3>& nodes, double a,
                                               double b, int dim) {
  std::array<double, 3> w{};
  for (int m = 0; m < 3; ++m) {
    Poly p{};
    p[0] = 1.0;
    double denom = 1.0;
    for (int k = 0; k < 3; ++k) {
      if (k == m) continue;
      p = poly_mul_linear(p, a - nodes[k]);
      denom *= nodes[m] - nodes[k];
    }
    for (int k = 1; k < dim; ++k) p = poly_mul_linear(p, a);
    w[m] = poly_integral(p, b - a) / denom;
  }
  return w;
}

}  // namespace detail

/// Strictly increasing radial nodes on [0, R] for a ball in dimension N.
class RadialGrid {
 public:
  static constexpr std::size_t min_intervals = 16;

  RadialGrid(std::vector<double> nodes, int dim) : nodes_(std::move(nodes)), dim_(dim) {
    if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("radial grid dimension must be 2 or 3");
    if (nodes_.size() < min_intervals + 1)
      throw std::invalid_argument("radial grid needs at least 16 intervals, got " +
                                  std::to_string(nodes_.empty() ? 0 : nodes_.size() - 1));
    if (nodes_.front() != 0.0) throw std::invalid_argument("radial grid must start at r = 0");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      if (!(nodes_[i + 1] > nodes_[i]) || !std::isfinite(nodes_[i + 1]))
        throw std::invalid_argument("radial grid nodes must be finite and strictly increasing");
    }
    build_weights();
  }

  static std::shared_ptr<const RadialGrid> uniform(int dim, double radius, std::size_t intervals) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    std::vector<double> r(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
      r[i] = radius * static_cast<double>(i) / static_cast<double>(intervals);
    r.back() = radius;
    return std::make_shared<const RadialGrid>(std::move(r), dim);
  }

  static std::shared_ptr<const RadialGrid> from_nodes(std::vector<double> nodes, int dim) {
    return std::make_shared<const RadialGrid>(std::move(nodes), dim);
  }

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  int dim() const { return dim_; }
  double radius() const { return nodes_.back(); }
  double omega() const { return WeightedNormConvention::for_dimension(dim_).omega; }

  /// Nodal weights w_j with sum_j w_j f_j ~ int_0^R f r^{N-1} dr.
  std::span<const double> weights() const { return weights_; }

  /// Index of the interval [r_i, r_{i+1}] containing r (the last one for r = R).
  std::size_t interval_of(double r) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    std::size_t i = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
    if (i == 0) return 0;
    return std::min(i - 1, intervals() - 1);
  }

  /// Polynomial degree the quadrature integrates exactly against s^{N-1}:
  /// 2 normally, 1 on strongly graded grids where the quadratic rule would
  /// produce a non-positive nodal weight.
  int exact_degree() const { return linear_ ? 1 : 2; }

  /// Weights of int_a^b f s^{N-1} ds for [a, b] inside interval i, applied to
  /// nodes first_node .. first_node + 3 (entries past the grid are zero).
  std::pair<std::size_t, std::array<double, 4>> interval_weights(std::size_t i, double a,
                                                                 double b) const {
    return linear_ ? linear_weights(i, a, b) : quadratic_weights(i, a, b);
  }

 private:
  std::pair<std::size_t, std::array<double, 4>> quadratic_weights(std::size_t i, double a,
                                                                   double b) const {
    const std::size_t k = intervals();
    // Interval 1 skips the stencil through the center node: its Lagrange
    // basis goes negative where s^{N-1} is largest.
    const bool has_left = i >= 2 || (i == 1 && i + 2 > k);
    const bool has_right = i + 2 <= k;
    std::size_t first = has_left ? i - 1 : i;
    std::array<double, 4> w{};
    auto add = [&](std::size_t start, double scale) {
      const std::array<double, 3> x{nodes_[start], nodes_[start + 1], nodes_[start + 2]};
      const auto m = detail::quadratic_moments(x, a, b, dim_);
      for (int j = 0; j < 3; ++j) w[start - first + static_cast<std::size_t>(j)] += scale * m[j];
    };
    if (has_left && has_right) {
      add(i - 1, 0.5);
      add(i, 0.5);
    } else if (has_left) {
      add(i - 1, 1.0);
    } else {
      add(i, 1.0);
    }
    return {first, w};
  }

  std::pair<std::size_t, std::array<double, 4>> linear_weights(std::size_t i, double a,
                                                               double b) const {
    const double x0 = nodes_[i], x1 = nodes_[i + 1];
    std::array<double, 4> w{};
    for (int m = 0; m < 2; ++m) {
      detail::Poly p{};
      p[0] = 1.0;
      p = detail::poly_mul_linear(p, a - (m == 0 ? x1 : x0));
      for (int k = 1; k < dim_; ++k) p = detail::poly_mul_linear(p, a);
      w[static_cast<std::size_t>(m)] =
          detail::poly_integral(p, b - a) / (m == 0 ? x0 - x1 : x1 - x0);
    }
    return {i, w};
  }

  void build_weights() {
    for (bool linear : {false, true}) {
      linear_ = linear;
      weights_.assign(nodes_.size(), 0.0);
      for (std::size_t i = 0; i < intervals(); ++i) {
        auto [first, w] = interval_weights(i, nodes_[i], nodes_[i + 1]);
        for (std::size_t j = 0; j < 4 && first + j < nodes_.size(); ++j)
          weights_[first + j] += w[j];
      }
      if (std::all_of(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; })) return;
    }
  }

  std::vector<double> nodes_;
  int dim_;
  std::vector<double> weights_;
  bool linear_ = false;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// A scalar function of radius sampled at the nodes of a shared grid.
class RadialProfile {
 public:
  RadialProfile(GridPtr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("profile needs a grid");
    if (values_.size() != grid_->size())
      throw std::invalid_argument("profile length does not match grid node count");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("profile values must be finite");
  }

  static RadialProfile sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return {std::move(grid), std::move(v)};
  }

  static RadialProfile constant(GridPtr grid, double c) {
    std::vector<double> v(grid->size(), c);
    return {std::move(grid), std::move(v)};
  }

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Piecewise-quadratic interpolation consistent with the quadrature.
  double at(double r) const {
    const auto& g = *grid_;
    if (r < 0.0 || r > g.radius() * (1.0 + 1e-14))
      throw std::out_of_range("radius outside [0, R]");
    const std::size_t i = g.interval_of(r);
    const std::size_t k = g.intervals();
    auto quad = [&](std::size_t s) {
      const double x0 = g.node(s), x1 = g.node(s + 1), x2 = g.node(s + 2);
      return values_[s] * (r - x1) * (r - x2) / ((x0 - x1) * (x0 - x2)) +
             values_[s + 1] * (r - x0) * (r - x2) / ((x1 - x0) * (x1 - x2)) +
             values_[s + 2] * (r - x0) * (r - x1) / ((x2 - x0) * (x2 - x1));
    };
    if (i >= 2 && i + 2 <= k) return 0.5 * (quad(i - 1) + quad(i));
    if (i + 2 > k) return quad(i - 1);
    return quad(i);
  }

  RadialProfile map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), f);
    return {grid_, std::move(v)};
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

namespace detail {

inline void require_center_zero(const RadialProfile& u) {
  const double tol = 1e-10 * std::max(1.0, u.sup_abs());
  if (std::abs(u[0]) > tol)
    throw std::invalid_argument("radial velocity must vanish at r = 0, got u(0) = " +
                                std::to_string(u[0]));
}

}  // namespace detail

/// du/dr by second-order differences (one-sided at r = 0 and r = R).
inline RadialProfile radial_derivative(const RadialProfile& u) {
  return {u.grid_ptr(), detail::three_point_derivative(u.grid().nodes(), u.values())};
}

/// u/r, with the analytic limit u'(0) at the center.
inline RadialProfile ratio_over_radius(const RadialProfile& u) {
  detail::require_center_zero(u);
  const auto r = u.grid().nodes();
  std::vector<double> q(u.size());
  q[0] = detail::three_point_derivative(r, u.values(), 0);
  for (std::size_t i = 1; i < q.size(); ++i) q[i] = u[i] / r[i];
  return {u.grid_ptr(), std::move(q)};
}

/// div U = u_r + (N-1) u/r for U = u(r) x/r; N u'(0) at the center.
inline RadialProfile divergence(const RadialProfile& u) {
  detail::require_center_zero(u);
  const int n = u.grid().dim();
  const auto du = radial_derivative(u);
  const auto q = ratio_over_radius(u);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = du[i] + (n - 1) * q[i];
  f[0] = n * q[0];
  return {u.grid_ptr(), std::move(f)};
}

/// ||f||_{L^p(B_R)} = omega_N^{1/p} (int_0^R |f|^p r^{N-1} dr)^{1/p}; p = inf gives max |f|.
inline double lp_norm(const RadialProfile& f, double p) {
  if (std::isinf(p) && p > 0) return f.sup_abs();
  if (!(p >= 1.0)) throw std::invalid_argument("L^p exponent must be >= 1");
  const auto w = f.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * std::pow(std::abs(f[i]), p);
  sum = std::max(sum, 0.0);
  return std::pow(f.grid().omega() * sum, 1.0 / p);
}

/// int_0^r s^{N-1} F(s) ds.
inline double moment_integral(const RadialProfile& f, double r) {
  const auto& g = f.grid();
  if (!(r >= 0.0) || r > g.radius()) throw std::out_of_range("moment radius outside [0, R]");
  const std::size_t last = g.interval_of(r);
  double sum = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    const double b = (i == last) ? r : g.node(i + 1);
    auto [first, w] = g.interval_weights(i, g.node(i), b);
    for (std::size_t j = 0; j < 4 && first + j < g.size(); ++j) sum += w[j] * f[first + j];
  }
  return sum;
}

/// int_0^{r_k} s^{N-1} F ds at every node r_k.
inline std::vector<double> cumulative_moments(const RadialProfile& f) {
  const auto& g = f.grid();
  std::vector<double> out(g.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.intervals(); ++i) {
    auto [first, w] = g.interval_weights(i, g.node(i), g.node(i + 1));
    for (std::size_t j = 0; j < 4 && first + j < g.size(); ++j) sum += w[j] * f[first + j];
    out[i + 1] = sum;
  }
  return out;
}

}  // namespace radlab
