#include "radlab/radial_fields.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace radlab {
namespace {

constexpr double pi = std::numbers::pi;

// Random graded grid on [0, R]: cumulative sums of spacings in [0.5, 1.5].
GridPtr random_grid(int dim, double radius, std::size_t intervals, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> spacing(0.5, 1.5);
  std::vector<double> r(intervals + 1, 0.0);
  for (std::size_t i = 1; i <= intervals; ++i) r[i] = r[i - 1] + spacing(rng);
  const double scale = radius / r.back();
  for (auto& x : r) x *= scale;
  r.back() = radius;
  return RadialGrid::from_nodes(std::move(r), dim);
}

TEST(RadialGrid, RejectsInvalidNodes) {
  EXPECT_THROW(RadialGrid::uniform(3, 1.0, 15), std::invalid_argument);
  EXPECT_NO_THROW(RadialGrid::uniform(3, 1.0, 16));
  EXPECT_THROW(RadialGrid::uniform(4, 1.0, 32), std::invalid_argument);
  EXPECT_THROW(RadialGrid::uniform(3, -1.0, 32), std::invalid_argument);

  std::vector<double> shifted(20);
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = 0.1 + 0.05 * i;
  EXPECT_THROW(RadialGrid(shifted, 3), std::invalid_argument);

  std::vector<double> repeated(20);
  for (std::size_t i = 0; i < repeated.size(); ++i) repeated[i] = 0.05 * i;
  repeated[7] = repeated[6];
  EXPECT_THROW(RadialGrid(repeated, 2), std::invalid_argument);
}

TEST(WeightedNormConvention, SurfaceConstants) {
  EXPECT_NEAR(WeightedNormConvention::for_dimension(2).omega, 2.0 * pi, 1e-14);
  EXPECT_NEAR(WeightedNormConvention::for_dimension(3).omega, 4.0 * pi, 1e-14);
}

TEST(Divergence, IdentityFieldHasDivergenceN) {
  for (int dim : {2, 3}) {
    auto grid = RadialGrid::uniform(dim, 1.0, 32);
    auto f = divergence(RadialProfile::sample(grid, [](double r) { return r; }));
    for (double v : f.values()) EXPECT_NEAR(v, dim, 1e-12);
  }
}

TEST(Divergence, ZeroField) {
  auto grid = RadialGrid::uniform(3, 1.0, 32);
  auto f = divergence(RadialProfile::constant(grid, 0.0));
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(Divergence, QuadraticField) {
  auto grid = RadialGrid::uniform(3, 1.0, 40);
  auto f = divergence(RadialProfile::sample(grid, [](double r) { return r * r; }));
  for (std::size_t i = 0; i < grid->size(); ++i) EXPECT_NEAR(f[i], 4.0 * grid->node(i), 1e-12);
}

TEST(Divergence, LinearFieldIsConstantOnAnyGrid) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> slope(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 2;
    auto grid = random_grid(dim, 0.5 + trial * 0.1, 16 + static_cast<std::size_t>(trial), rng);
    const double c = slope(rng);
    auto f = divergence(RadialProfile::sample(grid, [c](double r) { return c * r; }));
    for (double v : f.values()) EXPECT_NEAR(v, c * dim, 1e-9 * std::max(1.0, std::abs(c)));
  }
}

TEST(Divergence, RejectsNonzeroCenterValue) {
  auto grid = RadialGrid::uniform(3, 1.0, 32);
  auto u = RadialProfile::sample(grid, [](double r) { return 1.0 + r; });
  EXPECT_THROW(divergence(u), std::invalid_argument);
}

TEST(Divergence, SecondOrderOnSmoothField) {
  // u = sin(pi r), div = pi cos(pi r) + 2 sin(pi r)/r in 3-D.
  auto exact = [](double r) {
    return r == 0.0 ? 3.0 * pi : pi * std::cos(pi * r) + 2.0 * std::sin(pi * r) / r;
  };
  double prev = 0.0;
  for (std::size_t k : {32u, 64u, 128u}) {
    auto grid = RadialGrid::uniform(3, 1.0, k);
    auto f = divergence(RadialProfile::sample(grid, [](double r) { return std::sin(pi * r); }));
    double err = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
      err = std::max(err, std::abs(f[i] - exact(grid->node(i))));
    if (prev > 0.0) {
      EXPECT_GT(std::log2(prev / err), 1.8);
    }
    prev = err;
  }
}

TEST(LpNorm, Examples) {
  auto grid = RadialGrid::uniform(3, 1.0, 32);
  auto one = RadialProfile::constant(grid, 1.0);
  EXPECT_NEAR(lp_norm(one, 1.0), 4.0 * pi / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(lp_norm(one, std::numeric_limits<double>::infinity()), 1.0);
  auto r = RadialProfile::sample(grid, [](double x) { return x; });
  EXPECT_NEAR(lp_norm(r, 2.0), std::sqrt(4.0 * pi / 5.0), 1e-12);
  EXPECT_THROW(lp_norm(r, 0.5), std::invalid_argument);
}

TEST(LpNorm, TwoDimensionalArea) {
  auto grid = RadialGrid::uniform(2, 2.0, 20);
  EXPECT_NEAR(lp_norm(RadialProfile::constant(grid, 1.0), 1.0), 4.0 * pi, 1e-12);
}

TEST(LpNorm, MonotoneInPointwiseOrder) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 2;
    auto grid = trial % 3 == 0 ? RadialGrid::uniform(dim, 1.0, 16 + trial % 50)
                               : random_grid(dim, 1.0, 16 + trial % 50, rng);
    std::vector<double> f(grid->size()), g(grid->size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = unit(rng);
      g[i] = f[i] + unit(rng) * (unit(rng) < 0.3 ? 1.0 : 0.0);
    }
    RadialProfile pf(grid, f), pg(grid, g);
    for (double p : {1.0, 2.0, 6.0, std::numeric_limits<double>::infinity()})
      EXPECT_LE(lp_norm(pf, p), lp_norm(pg, p) * (1.0 + 1e-14)) << "trial " << trial;
  }
}

TEST(Quadrature, NodalWeightsArePositive) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto grid = trial % 2 ? RadialGrid::uniform(2 + trial % 2, 1.0, 16 + trial)
                          : random_grid(2 + (trial / 2) % 2, 1.0, 16 + trial, rng);
    for (double w : grid->weights()) EXPECT_GT(w, 0.0);
  }
}

TEST(Quadrature, UniformAndSolverLikeGridsUseTheQuadraticRule) {
  for (std::size_t k : {16u, 33u, 128u, 1000u})
    for (int dim : {2, 3}) EXPECT_EQ(RadialGrid::uniform(dim, 1.0, k)->exact_degree(), 2);
  // Equal-mass radii r_j = (j/J)^{1/3}.
  std::vector<double> r(129);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = std::cbrt(static_cast<double>(j) / 128.0);
  EXPECT_EQ(RadialGrid(r, 3).exact_degree(), 2);
}

TEST(Quadrature, ExactForQuadraticProfiles) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), rad(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 2;
    const double radius = 0.5 + rad(rng);
    auto grid = trial % 2 ? RadialGrid::uniform(dim, radius, 16 + trial)
                          : random_grid(dim, radius, 16 + trial, rng);
    const double c0 = coef(rng), c1 = coef(rng);
    const double c2 = grid->exact_degree() >= 2 ? coef(rng) : 0.0;
    auto f = RadialProfile::sample(grid, [&](double r) { return c0 + c1 * r + c2 * r * r; });
    const double r = radius * rad(rng);
    const double n = dim;
    const double exact = c0 * std::pow(r, n) / n + c1 * std::pow(r, n + 1) / (n + 1) +
                         c2 * std::pow(r, n + 2) / (n + 2);
    const double scale = (std::abs(c0) + std::abs(c1) + std::abs(c2)) * std::pow(r, n) + 1e-300;
    EXPECT_NEAR(moment_integral(f, r), exact, 1e-12 * scale) << "trial " << trial;
  }
}

TEST(MomentIntegral, Examples) {
  auto grid = RadialGrid::uniform(3, 1.0, 32);
  EXPECT_NEAR(moment_integral(RadialProfile::constant(grid, 3.0), 1.0), 1.0, 1e-13);
  EXPECT_EQ(moment_integral(RadialProfile::constant(grid, 0.0), 0.7), 0.0);
  auto s = RadialProfile::sample(grid, [](double x) { return x; });
  EXPECT_NEAR(moment_integral(s, 1.0), 0.25, 1e-13);
  EXPECT_EQ(moment_integral(s, 0.0), 0.0);
  EXPECT_THROW(moment_integral(s, 1.5), std::out_of_range);
  EXPECT_THROW(moment_integral(s, -0.1), std::out_of_range);
}

TEST(MomentIntegral, CumulativeMatchesPointwise) {
  auto grid = RadialGrid::uniform(2, 1.0, 24);
  auto f = RadialProfile::sample(grid, [](double r) { return std::cos(3.0 * r); });
  auto cum = cumulative_moments(f);
  for (std::size_t i = 0; i < grid->size(); ++i)
    EXPECT_NEAR(cum[i], moment_integral(f, grid->node(i)), 1e-14);
}

TEST(RadialProfile, InterpolationReproducesQuadratics) {
  auto grid = RadialGrid::uniform(3, 1.0, 20);
  auto f = RadialProfile::sample(grid, [](double r) { return 1.0 - 2.0 * r + 3.0 * r * r; });
  for (double r : {0.0, 0.013, 0.5, 0.77, 1.0}) EXPECT_NEAR(f.at(r), 1.0 - 2.0 * r + 3.0 * r * r, 1e-13);
  EXPECT_THROW(f.at(1.1), std::out_of_range);
}

TEST(RadialProfile, RejectsNonFiniteValues) {
  auto grid = RadialGrid::uniform(3, 1.0, 16);
  std::vector<double> v(grid->size(), 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(RadialProfile(grid, v), std::invalid_argument);
  EXPECT_THROW(RadialProfile(grid, std::vector<double>(5, 0.0)), std::invalid_argument);
}

}  // namespace
}  // namespace radlab
