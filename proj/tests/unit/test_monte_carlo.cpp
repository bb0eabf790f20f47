#include <gtest/gtest.h>

#include <cmath>

#include "streamdist/monte_carlo.hpp"

using namespace streamdist;

TEST(MonteCarlo, ZQuantile) {
  // Two-sided 99%: Phi(z) = 0.995.
  EXPECT_NEAR(0.5 * std::erfc(-kZ99 / std::sqrt(2.0)), 0.995, 1e-12);
}

TEST(MonteCarlo, WilsonMatchesClosedForm) {
  for (std::size_t n : {10, 100, 2000}) {
    for (std::size_t x : {std::size_t{0}, std::size_t{1}, n / 3, n / 2, n - 1, n}) {
      const double p = static_cast<double>(x) / n;
      const double z = kZ99, z2 = z * z;
      const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
      const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n));
      const auto e = wilson(x, n);
      EXPECT_DOUBLE_EQ(e.point, p);
      EXPECT_NEAR(e.ci_low, std::max(0.0, center - half), 1e-12);
      EXPECT_NEAR(e.ci_high, std::min(1.0, center + half), 1e-12);
      EXPECT_LE(e.ci_low, e.point);
      EXPECT_GE(e.ci_high, e.point);
    }
  }
  EXPECT_EQ(wilson(0, 50).ci_low, 0.0);
  EXPECT_EQ(wilson(50, 50).ci_high, 1.0);
  EXPECT_THROW(wilson(1, 0), std::invalid_argument);
  EXPECT_THROW(wilson(3, 2), std::invalid_argument);
}

TEST(MonteCarlo, WilsonCoverage) {
  // Property: the 99% interval covers the true rate in roughly 99% of runs.
  Rng rng(1);
  int covered = 0;
  const int runs = 2000;
  for (int r = 0; r < runs; ++r) {
    std::size_t hits = 0;
    for (int t = 0; t < 200; ++t) hits += rng.bernoulli(0.3);
    const auto e = wilson(hits, 200);
    covered += e.ci_low <= 0.3 && 0.3 <= e.ci_high;
  }
  EXPECT_GE(covered, static_cast<int>(0.975 * runs));
}

TEST(MonteCarlo, FiveSigmaAndVariance) {
  EXPECT_DOUBLE_EQ(five_sigma_ceiling(0.25, 100), 0.25 + 5 * std::sqrt(0.25 * 0.75 / 100));
  const double nt = 100 + kZ99 * kZ99;
  const double pt = (30 + kZ99 * kZ99 / 2) / nt;
  EXPECT_DOUBLE_EQ(proportion_variance(30, 100), pt * (1 - pt) / nt);
}

TEST(MonteCarlo, ConstantTesterSplitsEvenly) {
  const auto spec = SourceSpec::subspace(8, 2);
  const auto est = estimate_success(distinguisher_factory("constant", {{"value", 1}}, spec), spec, std::nullopt, 101,
                                    3);
  EXPECT_EQ(est.null_correct.point, 0.0);
  EXPECT_EQ(est.planted_correct.point, 1.0);
  EXPECT_EQ(est.null_correct.trials, 50u);
  EXPECT_EQ(est.planted_correct.trials, 51u);
  EXPECT_DOUBLE_EQ(est.success.point, 51.0 / 101.0);
}

TEST(MonteCarlo, EstimateIsThreadInvariant) {
  const auto spec = SourceSpec::subspace(12, 3);
  const auto make = distinguisher_factory("orthogonal_tester", {{"iterations", 5}}, spec);
  const auto a = estimate_success(make, spec, std::nullopt, 300, 99, 1);
  const auto b = estimate_success(make, spec, std::nullopt, 300, 99, 4);
  EXPECT_EQ(a.success.point, b.success.point);
  EXPECT_EQ(a.null_correct.point, b.null_correct.point);
  EXPECT_EQ(a.mean_samples, b.mean_samples);
  EXPECT_EQ(a.memory.data_bits, b.memory.data_bits);
}

TEST(MonteCarlo, HybridDeltasTelescope) {
  const auto p = builtin_predicate("xor", 2);
  const auto spec = SourceSpec::local_prg(10, p);
  const auto make = distinguisher_factory("local_prefix", {{"w", 6}, {"count", 8}}, spec);
  const auto rep = hybrid_deltas(make, p, 10, 8, 400, 5, 2);
  ASSERT_EQ(rep.q.size(), 9u);
  ASSERT_EQ(rep.deltas.size(), 8u);
  // Adjacent differences sum to the end-to-end difference of the hybrids.
  EXPECT_NEAR(rep.telescoped, rep.q.front().point - rep.q.back().point, 1e-12);
  EXPECT_GT(rep.combined_half_width, 0.0);
  const auto again = hybrid_deltas(make, p, 10, 8, 400, 5, 1);
  EXPECT_EQ(again.telescoped, rep.telescoped);
  EXPECT_EQ(again.direct_gap.point, rep.direct_gap.point);
}

TEST(MonteCarlo, CoinFlipHasNoGap) {
  const auto p = builtin_predicate("xor", 2);
  const auto make = distinguisher_factory("coin_flip", {}, SourceSpec::local_prg(8, p));
  const auto rep = hybrid_deltas(make, p, 8, 4, 3000, 11);
  EXPECT_LE(rep.direct_gap.ci_low, 0.0);
  EXPECT_GE(rep.direct_gap.ci_high, 0.0);
}
