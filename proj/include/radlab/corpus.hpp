#pragma once

// Seeded families of smooth radial velocity profiles with u(0) = u(R) = 0,
// used by the property suites and the verify-estimates subcommand.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "radlab/radial_fields.hpp"

namespace radlab {

/// Sum of sine modes sin(k pi r / R) and polynomial modes r^m (R - r).
class SmoothRadialField {
 public:
  struct Mode {
    bool trigonometric;
    int order;
    double coefficient;
  };

  SmoothRadialField(double radius, std::vector<Mode> modes)
      : radius_(radius), modes_(std::move(modes)) {}

  /// 1 to 5 modes, coefficients uniform in [-1, 1].
  template <class Rng>
  static SmoothRadialField random(double radius, Rng& rng) {
    std::uniform_int_distribution<int> count(1, 5), sine_order(1, 5), poly_order(1, 4);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), coin(0.0, 1.0);
    const int m = count(rng);
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const bool trig = coin(rng) < 0.5;
      const int order = trig ? sine_order(rng) : poly_order(rng);
      modes.push_back({trig, order, coef(rng)});
    }
    return {radius, std::move(modes)};
  }

  double operator()(double r) const {
    double s = 0.0;
    for (const auto& m : modes_) {
      if (m.trigonometric)
        s += m.coefficient * std::sin(m.order * std::numbers::pi * r / radius_);
      else
        s += m.coefficient * std::pow(r, m.order) * (radius_ - r);
    }
    return s;
  }

  double derivative(double r) const {
    double s = 0.0;
    for (const auto& m : modes_) {
      if (m.trigonometric) {
        const double k = m.order * std::numbers::pi / radius_;
        s += m.coefficient * k * std::cos(k * r);
      } else {
        s += m.coefficient * (m.order * std::pow(r, m.order - 1) * (radius_ - r) -
                              std::pow(r, m.order));
      }
    }
    return s;
  }

  RadialProfile sample(const GridPtr& grid) const {
    return RadialProfile::sample(grid, [this](double r) { return (*this)(r); });
  }

  const std::vector<Mode>& modes() const { return modes_; }
  double radius() const { return radius_; }

 private:
  double radius_;
  std::vector<Mode> modes_;
};

/// `count` profiles from a dedicated generator seeded with `seed`.
inline std::vector<SmoothRadialField> smooth_field_corpus(std::size_t count, double radius,
                                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SmoothRadialField> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(SmoothRadialField::random(radius, rng));
  return out;
}

}  // namespace radlab
