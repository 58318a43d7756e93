#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "radlab/uniqueness.hpp"

using namespace radlab;

namespace {

const GasParams kGas{1.0, 1.4, 0.5, 0.0};

struct Pair {
  LagrangianState first, second;
};

Pair twin_states(double delta, std::size_t cells = 64, int dim = 3) {
  auto g = RadialGrid::uniform(dim, 1.0, 2048);
  auto rho = RadialProfile::sample(
      g, [](double r) { return 1.0 + 0.1 * (1.0 - r * r) * (1.0 - r * r); });
  auto u = RadialProfile::sample(g, [](double r) { return 0.1 * r * (1.0 - r); });
  return {init(rho, u, kGas, cells), init(perturb_density(rho, delta), u, kGas, cells)};
}

double sup_diff(const std::vector<DiffRecord>& recs) {
  double m = 0.0;
  for (const auto& d : recs) m = std::max(m, std::sqrt(d.lambda_sq) + std::sqrt(d.theta_sq));
  return m;
}

}  // namespace

TEST(PerturbDensity, PreservesMass) {
  auto g = RadialGrid::uniform(3, 1.0, 512);
  auto rho = RadialProfile::sample(g, [](double r) { return 2.0 + std::cos(r); });
  const auto p = perturb_density(rho, 0.3);
  EXPECT_NEAR(cumulative_moments(p).back(), cumulative_moments(rho).back(), 1e-14);
  const auto same = perturb_density(rho, 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_EQ(same[i], rho[i]);
}

TEST(TwinRun, ZeroPerturbationIsBitIdentical) {
  auto [a, b] = twin_states(0.0);
  const auto res = twin_run(a, b, kGas, {0.05, 0.4, Splitting::FirstOrder, 0});
  ASSERT_GT(res.records.size(), 10u);
  for (const auto& d : res.records) {
    EXPECT_EQ(d.lambda_sq, 0.0);
    EXPECT_EQ(d.theta_sq, 0.0);
    EXPECT_EQ(d.flux_sq, 0.0);
    EXPECT_EQ(d.gronwall_rhs, 0.0);
  }
  EXPECT_EQ(res.first.back().v, res.second.back().v);
  EXPECT_EQ(res.first.back().u, res.second.back().u);
  const auto rep = gronwall_check(res.records, 1.0);
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.fitted_constant, 0.0);
}

TEST(TwinRun, SharedTimesAndRecordsPerStep) {
  auto [a, b] = twin_states(1e-2);
  const auto res = twin_run(a, b, kGas, {0.05, 0.4, Splitting::FirstOrder, 0});
  ASSERT_EQ(res.records.size(), res.first.size());
  ASSERT_EQ(res.first.size(), res.second.size());
  for (std::size_t k = 0; k < res.first.size(); ++k) {
    EXPECT_EQ(res.first.time(k), res.second.time(k));
    EXPECT_EQ(res.records[k].t, res.first.time(k));
    EXPECT_GE(res.records[k].lambda_sq, 0.0);
    EXPECT_TRUE(std::isfinite(res.records[k].gronwall_rhs));
  }
  EXPECT_NEAR(res.first.back().t, 0.05, 1e-14);
}

TEST(TwinRun, LinearResponseInDelta) {
  double s[3];
  const double deltas[3] = {1e-3, 5e-4, 1e-6};
  for (int i = 0; i < 3; ++i) {
    auto [a, b] = twin_states(deltas[i]);
    s[i] = sup_diff(twin_run(a, b, kGas, {0.1, 0.4, Splitting::FirstOrder, 0}).records);
  }
  EXPECT_NEAR(s[0] / s[1], 2.0, 0.2);
  EXPECT_NEAR((s[0] / deltas[0]) / (s[2] / deltas[2]), 1.0, 0.1);
}

TEST(TwinRun, AbortNamesTheRun) {
  auto [a, b] = twin_states(0.0);
  for (std::size_t j = 10; j < 30; ++j) b.u[j] = -1e4;
  EXPECT_THROW(
      {
        try {
          twin_run(a, b, kGas, {0.05, 0.4, Splitting::FirstOrder, 0});
        } catch (const TwinRunAborted& e) {
          EXPECT_EQ(e.run(), 2);
          throw;
        }
      },
      TwinRunAborted);
}

TEST(Gronwall, FittedConstantStableUnderDtHalving) {
  auto [a, b] = twin_states(1e-3);
  const double dt = 0.9 * std::min(stability_limit(a, kGas), stability_limit(b, kGas));
  const std::size_t steps = static_cast<std::size_t>(std::ceil(0.1 / dt));
  const auto coarse = twin_run(a, b, kGas, {0.1, 0.4, Splitting::FirstOrder, steps});
  const auto fine = twin_run(a, b, kGas, {0.1, 0.4, Splitting::FirstOrder, 2 * steps});
  const double c1 = gronwall_check(coarse.records, 1.0).fitted_constant;
  const double c2 = gronwall_check(fine.records, 1.0).fitted_constant;
  EXPECT_GT(c1, 0.0);
  EXPECT_NEAR(c2 / c1, 1.0, 0.2);

  const double eps = kGas.kappa() / (4.0 * coarse.v_max);
  const double ca = analytic_gronwall_constant(kGas, eps, coarse.v_min, coarse.v_max);
  const auto rep = gronwall_check(coarse.records, ca);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.final_value, rep.implied_bound);
  for (const auto& d : coarse.records) EXPECT_LE(d.y(), d.gronwall_rhs * (1.0 + 1e-12));
}

TEST(Gronwall, SyntheticSuperExponentialGrowthFails) {
  std::vector<DiffRecord> recs(50);
  double y = 1e-6;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    recs[k].t = 0.01 * k;
    recs[k].dt = k ? 0.01 : 0.0;
    recs[k].lambda_sq = y;
    recs[k].weight = 1.0;
    y *= 1.0 + 0.01 * double(k * k);
  }
  const auto rep = gronwall_check(recs, 100.0);
  EXPECT_FALSE(rep.holds);
  EXPECT_NEAR(rep.fitted_constant, 48.0 * 48.0, 1e-6);
  EXPECT_EQ(rep.worst_step, 48u);

  std::vector<DiffRecord> from_zero(2);
  from_zero[1].dt = 0.1;
  from_zero[1].theta_sq = 1e-30;
  EXPECT_TRUE(std::isinf(gronwall_check(from_zero, 1e6).fitted_constant));
  EXPECT_THROW(gronwall_check({DiffRecord{}}, 1.0), std::invalid_argument);
}

TEST(Gronwall, AnalyticConstantDomain) {
  EXPECT_THROW(analytic_gronwall_constant(kGas, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(analytic_gronwall_constant(kGas, 0.0, 1.0, 1.0), std::invalid_argument);
  // kappa = 1, vmin = 1: max(1 + 1.96, 1) / (2 * 0.25).
  EXPECT_NEAR(analytic_gronwall_constant(kGas, 0.25, 1.0, 1.0), 2.96 / 0.5, 1e-14);
}

TEST(PressureLipschitz, Examples) {
  LagrangianState s1, s2;
  s1.v = {1.0};
  s2.v = {2.0};
  const GasParams gas{1.0, 2.0, 1.0, 0.0};
  const auto rep = pressure_lipschitz_check(s1, s2, gas, 1.0);
  EXPECT_DOUBLE_EQ(rep.constant, 2.0);
  EXPECT_DOUBLE_EQ(rep.max_ratio, 0.75 / 2.0);
  EXPECT_TRUE(rep.satisfied);

  const auto same = pressure_lipschitz_check(s1, s1, gas);
  EXPECT_EQ(same.max_ratio, 0.0);
  EXPECT_TRUE(same.satisfied);

  // A vmin above the true minimum must be caught, with the witness cell.
  LagrangianState a, b;
  a.v = {1.0, 1.0, 0.5};
  b.v = {1.0, 1.0, 0.6};
  const auto bad = pressure_lipschitz_check(a, b, gas, 1.0);
  EXPECT_FALSE(bad.satisfied);
  EXPECT_EQ(bad.witness_cell, 2u);
}

TEST(PressureLipschitz, RandomPairsAndRunStates) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.5, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    LagrangianState a, b;
    for (int j = 0; j < 50; ++j) {
      a.v.push_back(dist(rng));
      b.v.push_back(dist(rng));
    }
    EXPECT_TRUE(pressure_lipschitz_check(a, b, kGas).satisfied);
  }
  auto [s1, s2] = twin_states(1e-2);
  const auto res = twin_run(s1, s2, kGas, {0.05, 0.4, Splitting::FirstOrder, 0});
  for (std::size_t k = 0; k < res.first.size(); ++k)
    EXPECT_TRUE(pressure_lipschitz_check(res.first.state(k), res.second.state(k), kGas).satisfied);
}
