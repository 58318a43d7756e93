#include "radlab/sharp_estimates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "radlab/corpus.hpp"

namespace radlab {
namespace {

constexpr double pi = std::numbers::pi;

// Dense-sampling oracle: analytic eigenvalue profiles on a fine uniform
// grid, L^p norm of the divergence by composite Simpson.
struct DenseOracle {
  int dim;
  double radius;
  std::size_t samples = 20000;  // even

  double gradient_sup(const SmoothRadialField& u) const {
    double m = 0.0;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double r = radius * static_cast<double>(i) / samples;
      const double ur = u.derivative(r);
      const double q = r == 0.0 ? u.derivative(0.0) : u(r) / r;
      m = std::max({m, std::abs(ur), std::abs(q)});
    }
    return m;
  }

  double div_at(const SmoothRadialField& u, double r) const {
    if (r == 0.0) return dim * u.derivative(0.0);
    return u.derivative(r) + (dim - 1) * u(r) / r;
  }

  double div_lp(const SmoothRadialField& u, double p) const {
    const double h = radius / samples;
    double sum = 0.0;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double r = h * static_cast<double>(i);
      const double w = (i == 0 || i == samples) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * std::pow(std::abs(div_at(u, r)), p) * std::pow(r, dim - 1);
    }
    const double omega = dim == 2 ? 2.0 * pi : 4.0 * pi;
    return std::pow(omega * sum * h / 3.0, 1.0 / p);
  }
};

TEST(GradientSupNorm, Examples) {
  auto grid = RadialGrid::uniform(3, 1.0, 64);
  EXPECT_NEAR(gradient_sup_norm(RadialProfile::sample(grid, [](double r) { return r; })), 1.0,
              1e-12);
  EXPECT_EQ(gradient_sup_norm(RadialProfile::constant(grid, 0.0)), 0.0);

  // u = r(1 - r): dense sampling of max(|1 - 2r|, |1 - r|) gives 1 at r = 0.
  double dense = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double r = i / 100000.0;
    dense = std::max({dense, std::abs(1.0 - 2.0 * r), std::abs(1.0 - r)});
  }
  ASSERT_DOUBLE_EQ(dense, 1.0);
  auto u = RadialProfile::sample(grid, [](double r) { return r * (1.0 - r); });
  EXPECT_NEAR(gradient_sup_norm(u), dense, 1e-12);
}

TEST(GradientSupNorm, AgreesWithDenseOracleOnCorpus) {
  const auto corpus = smooth_field_corpus(40, 1.0, 2024);
  auto grid = RadialGrid::uniform(3, 1.0, 512);
  DenseOracle oracle{3, 1.0};
  for (const auto& f : corpus) {
    const double expected = oracle.gradient_sup(f);
    EXPECT_NEAR(gradient_sup_norm(f.sample(grid)), expected, 2e-3 * expected);
  }
}

TEST(LinftyBounds, LinearFieldSaturatesLowerBound) {
  for (int dim : {2, 3}) {
    auto grid = RadialGrid::uniform(dim, 1.0, 64);
    auto b = verify_linfty_bounds(RadialProfile::sample(grid, [](double r) { return r; }));
    EXPECT_TRUE(b.satisfied());
    EXPECT_NEAR(b.lower.lhs, 1.0, 1e-12);
    EXPECT_NEAR(b.lower.rhs, 1.0, 1e-12);
    EXPECT_NEAR(b.lower.margin, 0.0, 1e-12);
    EXPECT_NEAR(b.upper.lhs / (b.upper.rhs / (2.0 + 1.0 / dim)), 1.0 / dim, 1e-12);
  }
}

TEST(LinftyBounds, ZeroFieldIsTriviallySatisfied) {
  auto grid = RadialGrid::uniform(3, 1.0, 32);
  auto b = verify_linfty_bounds(RadialProfile::constant(grid, 0.0));
  EXPECT_TRUE(b.satisfied());
  EXPECT_EQ(b.lower.lhs, 0.0);
  EXPECT_EQ(b.upper.rhs, 0.0);
}

TEST(LinftyBounds, RandomCorpusRespectsBothConstants) {
  for (int dim : {2, 3}) {
    auto grid = RadialGrid::uniform(dim, 1.0, 256);
    const auto corpus = smooth_field_corpus(1000, 1.0, 17 + dim);
    double sup_ratio = 0.0, inf_ratio = 1e300;
    for (const auto& f : corpus) {
      auto u = f.sample(grid);
      auto b = verify_linfty_bounds(u);
      ASSERT_TRUE(b.satisfied());
      const double ratio = b.upper.lhs / lp_norm(divergence(u), 1.0 / 0.0);
      sup_ratio = std::max(sup_ratio, ratio);
      inf_ratio = std::min(inf_ratio, ratio);
    }
    EXPECT_LE(sup_ratio, 2.0 + 1.0 / dim + 1e-9);
    EXPECT_GE(inf_ratio, 1.0 / dim - 1e-9);
  }
}

TEST(LinftyBounds, RatiosAreScaleInvariant) {
  auto grid = RadialGrid::uniform(3, 1.0, 128);
  for (const auto& f : smooth_field_corpus(50, 1.0, 99)) {
    auto u = f.sample(grid);
    auto base = verify_linfty_bounds(u);
    auto base_lp = pointwise_lp_bound(u, 2.0);
    for (double c : {-3.0, 1e-4, 250.0}) {
      auto scaled = u.map([c](double x) { return c * x; });
      auto b = verify_linfty_bounds(scaled);
      EXPECT_NEAR(b.lower.ratio(), base.lower.ratio(), 1e-13 * base.lower.ratio());
      EXPECT_NEAR(b.upper.ratio(), base.upper.ratio(), 1e-13 * base.upper.ratio());
      auto lp = pointwise_lp_bound(scaled, 2.0);
      EXPECT_NEAR(lp.ratio.ratio(), base_lp.ratio.ratio(), 1e-12 * base_lp.ratio.ratio());
    }
  }
}

TEST(PointwiseLp, LinearFieldIsSharpAtTheWall) {
  for (int dim : {2, 3}) {
    auto grid = RadialGrid::uniform(dim, 1.0, 64);
    auto u = RadialProfile::sample(grid, [](double r) { return r; });
    for (double p : {1.0, 2.0, 6.0}) {
      auto b = pointwise_lp_bound(u, p);
      EXPECT_TRUE(b.ratio.satisfied);
      EXPECT_DOUBLE_EQ(b.ratio.witness_radius, 1.0);
      EXPECT_NEAR(b.ratio.lhs / b.ratio.rhs, 1.0, 1e-12);
    }
  }
}

TEST(PointwiseLp, ZeroField) {
  auto grid = RadialGrid::uniform(2, 1.0, 32);
  auto b = pointwise_lp_bound(RadialProfile::constant(grid, 0.0), 2.0);
  EXPECT_TRUE(b.satisfied());
  EXPECT_EQ(b.ratio.lhs, 0.0);
  EXPECT_EQ(b.derivative.rhs, 0.0);
}

TEST(PointwiseLp, InfiniteExponentIsRoutedElsewhere) {
  auto grid = RadialGrid::uniform(3, 1.0, 32);
  auto u = RadialProfile::sample(grid, [](double r) { return r; });
  EXPECT_THROW(pointwise_lp_bound(u, std::numeric_limits<double>::infinity()),
               std::invalid_argument);
  EXPECT_THROW(pointwise_lp_bound(u, 0.5), std::invalid_argument);
}

TEST(PointwiseLp, RatioLineHoldsOnRandomCorpus) {
  for (int dim : {2, 3}) {
    auto grid = RadialGrid::uniform(dim, 1.0, 256);
    for (const auto& f : smooth_field_corpus(300, 1.0, 5 + dim)) {
      auto u = f.sample(grid);
      for (double p : {2.0, 6.0}) EXPECT_TRUE(pointwise_lp_bound(u, p).ratio.satisfied);
    }
  }
}

// The |u_r| line cannot hold in general: |u_r| >= |F| - (N-1)|u/r| and the
// pointwise value |F(r)| is not controlled by ||F||_{L^p}.  The corpus has
// fields where the dense analytic oracle confirms a genuine violation.
TEST(PointwiseLp, DerivativeLineHasGenuineCounterexamples) {
  const int dim = 2;
  const double p = 2.0;
  auto grid = RadialGrid::uniform(dim, 1.0, 512);
  DenseOracle oracle{dim, 1.0};
  int flagged = 0, confirmed = 0;
  for (const auto& f : smooth_field_corpus(200, 1.0, 8)) {
    auto b = pointwise_lp_bound(f.sample(grid), p);
    if (b.derivative.satisfied) continue;
    ++flagged;
    const double r = b.derivative.witness_radius;
    const double omega = 2.0 * pi;
    const double bound =
        (1.0 + (dim - 1) * std::pow(1.0 / dim, 1.0 - 1.0 / p) * std::pow(r, -dim / p) *
                   std::pow(omega, -1.0 / p)) *
        oracle.div_lp(f, p);
    if (std::abs(f.derivative(r)) > bound * (1.0 + 1e-6)) ++confirmed;
  }
  EXPECT_GT(flagged, 0);
  EXPECT_EQ(confirmed, flagged);
}

TEST(Reconstruct, Examples) {
  for (int dim : {2, 3}) {
    auto grid = RadialGrid::uniform(dim, 1.0, 48);
    auto u = reconstruct_u_from_div(RadialProfile::constant(grid, dim));
    for (std::size_t i = 0; i < grid->size(); ++i) EXPECT_NEAR(u[i], grid->node(i), 1e-13);
    auto z = reconstruct_u_from_div(RadialProfile::constant(grid, 0.0));
    for (double v : z.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Reconstruct, RoundTripConvergesAtSecondOrder) {
  for (int dim : {2, 3}) {
    for (const auto& f : smooth_field_corpus(20, 1.0, 31 + dim)) {
      std::vector<double> errors;
      for (std::size_t k : {64u, 128u, 256u}) {
        auto grid = RadialGrid::uniform(dim, 1.0, k);
        auto u = f.sample(grid);
        auto back = reconstruct_u_from_div(divergence(u));
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(back[i] - u[i]));
        errors.push_back(err);
      }
      // Single r(R - r) modes are reproduced to roundoff.
      if (errors[0] < 1e-12) continue;
      EXPECT_LT(errors[0], 5e-2 * std::max(1.0, gradient_sup_norm(f.sample(
                                                    RadialGrid::uniform(dim, 1.0, 64)))));
      EXPECT_GE(std::log2(errors[0] / errors[1]), 1.9);
      EXPECT_GE(std::log2(errors[1] / errors[2]), 1.9);
    }
  }
}

TEST(EstimateReport, ToleranceSeparatesRoundoffFromViolation) {
  EXPECT_TRUE(EstimateReport::make(1.0 + 5e-8, 1.0, 0.0).satisfied);
  EXPECT_FALSE(EstimateReport::make(1.0 + 1e-6, 1.0, 0.0).satisfied);
  EXPECT_TRUE(EstimateReport::make(5e-10, 0.0, 0.0).satisfied);
}

}  // namespace
}  // namespace radlab
