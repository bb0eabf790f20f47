#include <gtest/gtest.h>

#include <cmath>

#include "streamdist/errors.hpp"
#include "streamdist/reductions.hpp"

using namespace streamdist;

namespace {

double binomial_pmf(std::size_t n, std::size_t c, double q) {
  double coeff = 1;
  for (std::size_t i = 0; i < c; ++i) coeff = coeff * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return coeff * std::pow(q, static_cast<double>(c)) * std::pow(1 - q, static_cast<double>(n - c));
}

}  // namespace

TEST(Reductions, VoteCreditsGuessOnOutputOne) {
  static_assert(step4_vote(true, true) == true);
  static_assert(step4_vote(true, false) == false);
  static_assert(step4_vote(false, true) == false);
  static_assert(step4_vote(false, false) == true);
  EXPECT_TRUE(majority_bit(2, 3));
  EXPECT_FALSE(majority_bit(3, 2));
  EXPECT_TRUE(majority_bit(2, 2));  // ties go to 1
}

TEST(Reductions, ParityTransformLayout) {
  const EquationSample s{BitString::from_string("1011"), true};
  const auto id = Gf2Matrix::identity(6);
  // Drop coordinate 2 (value 1), then b + g a^2 = 1 + 1 = 0, then zero padding.
  EXPECT_EQ(parity_transform(s, 2, true, id).to_string(), "101000");
  EXPECT_EQ(parity_transform(s, 2, false, id).to_string(), "101100");
  EXPECT_THROW(parity_transform(s, 4, true, id), std::out_of_range);
  EXPECT_THROW(parity_transform(s, 0, true, Gf2Matrix::identity(3)), DimensionError);
}

TEST(Reductions, ParityTransformDimensionDependsOnGuess) {
  Rng rng(1);
  const std::size_t kp = 6, n = 10;
  for (int t = 0; t < 20; ++t) {
    const BitString x = uniform_bitstring(kp, rng);
    const std::size_t i = rng.uniform_below(kp);
    const Gf2Matrix m = sample_full_rank_map(n, rng);
    for (bool g : {false, true}) {
      std::vector<BitString> vs;
      for (int r = 0; r < 60; ++r) {
        const BitString a = uniform_bitstring(kp, rng);
        vs.push_back(parity_transform(EquationSample{a, inner_product(a, x)}, i, g, m));
      }
      const std::size_t expected = g == x.test(i) ? kp - 1 : kp;
      EXPECT_EQ(rank(std::span<const BitString>(vs)), expected);
    }
  }
}

TEST(Reductions, SparseTransformLayout) {
  const EquationSample s{BitString::from_string("0110"), false};
  const BitString y = BitString::from_string("101");
  // Drop coordinate 1 -> a' = 010; b' = 0 + g*1 + <010, 101> = g.
  const auto t1 = sparse_transform(s, 1, true, y);
  EXPECT_EQ(t1.a.to_string(), "010");
  EXPECT_TRUE(t1.b);
  EXPECT_FALSE(sparse_transform(s, 1, false, y).b);
  EXPECT_THROW(sparse_transform(s, 1, true, BitString(4)), DimensionError);
}

TEST(Reductions, SparseTransformPlantsShiftedSecret) {
  Rng rng(2);
  const std::size_t np = 9;
  const BitString x = uniform_bitstring(np, rng);
  const BitString y = uniform_bitstring(np - 1, rng);
  const std::size_t i = 4;
  BitString target(np - 1);
  for (std::size_t h = 0, o = 0; h < np; ++h) {
    if (h != i) target.set(o++, x.test(h));
  }
  target ^= y;
  for (int r = 0; r < 200; ++r) {
    const BitString a = uniform_bitstring(np, rng);
    const auto t = sparse_transform(EquationSample{a, inner_product(a, x)}, i, x.test(i), y);
    EXPECT_EQ(t.b, inner_product(t.a, target));
  }
}

TEST(Reductions, FeedProbabilityIsTwiceTheRate) {
  for (std::size_t n : {4, 6, 10, 33}) {
    for (std::size_t k = 1; 2 * k <= n; ++k) {
      EXPECT_EQ(sparse_feed_probability_exact(n, k),
                Rational(static_cast<long long>(2 * k), static_cast<long long>(n)));
      EXPECT_NEAR(sparse_feed_probability(n, k), 2.0 * k / n, 1e-15);
    }
  }
  EXPECT_DOUBLE_EQ(sparse_subsample_rate(10, 2), 0.25);
  EXPECT_THROW(sparse_subsample_rate(10, 6), std::domain_error);
}

TEST(Reductions, FeedBudgetFormula) {
  const double expected = std::ceil(16.0 / 4.0 * (64.0 + 16.0 * std::log(16.0 / 0.25)));
  EXPECT_EQ(default_feed_budget(16, 4, 64), static_cast<std::size_t>(expected));
}

TEST(Reductions, ChernoffReps) {
  EXPECT_EQ(chernoff_reps(0.1, 0.01), static_cast<std::size_t>(std::ceil(std::log(100.0) / 0.02)));
  EXPECT_THROW(chernoff_reps(0.0, 0.1), std::domain_error);
  // The Hoeffding count really achieves the failure target.
  for (double adv : {0.05, 0.1, 0.2}) {
    const auto reps = chernoff_reps(adv, 0.01);
    EXPECT_GE(majority_success_probability(0.5 + adv, reps), 0.99);
  }
}

TEST(Reductions, MajorityProbabilityMatchesBinomialSum) {
  for (std::size_t reps : {1, 2, 5, 10, 51}) {
    for (double q : {0.0, 0.3, 0.5, 0.6, 0.9, 1.0}) {
      double expected = 0;
      for (std::size_t c = reps / 2 + 1; c <= reps; ++c) expected += binomial_pmf(reps, c, q);
      EXPECT_NEAR(majority_success_probability(q, reps), expected, 1e-12) << reps << " " << q;
    }
  }
}

TEST(Reductions, OraclesProduceLabelledEquations) {
  Rng rng(3);
  const BitString x = uniform_bitstring(12, rng);
  ParityOracle po(x, 5, 50);
  int count = 0;
  while (auto s = po.next()) {
    const auto& e = std::get<EquationSample>(*s);
    EXPECT_EQ(e.b, inner_product(e.a, x));
    ++count;
  }
  EXPECT_EQ(count, 50);

  SparseEquationOracle so(x, 0.25, 6);
  std::size_t ones = 0;
  for (int r = 0; r < 2000; ++r) {
    const auto e = std::get<EquationSample>(*so.next());
    EXPECT_EQ(e.b, inner_product(e.a, x));
    ones += e.a.popcount();
  }
  EXPECT_NEAR(ones / 24000.0, 0.25, 5 * std::sqrt(0.25 * 0.75 / 24000.0));
}

TEST(Reductions, LearnParityWithRankTester) {
  Rng rng(4);
  const std::size_t n = 10, kp = 5;
  const auto make = distinguisher_factory(
      "rank_threshold", {{"r", kp - 1.0}, {"window", 8.0 * kp}, {"n_eff", static_cast<double>(n)}},
      SourceSpec::subspace(n, kp));
  for (int t = 0; t < 10; ++t) {
    const BitString x = uniform_bitstring(kp, rng);
    ParityOracle oracle(x, rng());
    const auto rep = learn_parity(make, n, kp, 5, 8 * kp, oracle, rng);
    EXPECT_EQ(rep.estimate, x);
    EXPECT_EQ(rep.votes.size(), kp);
    EXPECT_EQ(rep.log.size(), kp * 5);
    EXPECT_EQ(rep.samples_consumed, kp * 5 * 8 * kp);
    for (const auto& v : rep.log) EXPECT_EQ(v.credited, step4_vote(v.output, v.g));
  }
}

TEST(Reductions, LearnParityRunsOutOfSamples) {
  Rng rng(5);
  const auto make = distinguisher_factory("rank_threshold", {{"r", 2}, {"window", 8}, {"n_eff", 6}},
                                          SourceSpec::subspace(6, 3));
  ParityOracle oracle(BitString(3), 1, 10);
  EXPECT_THROW(learn_parity(make, 6, 3, 3, 8, oracle, rng), InsufficientSamples);
}

TEST(Reductions, LearnSparseParity) {
  Rng rng(6);
  const std::size_t n = 10, k = 2, inner = 40;
  const auto make = distinguisher_factory("sparse_sat", {{"m0", static_cast<double>(inner)}},
                                          SourceSpec::sparse_parity(n, k));
  for (int t = 0; t < 5; ++t) {
    const BitString x = uniform_bitstring(n + 1, rng);
    SparseEquationOracle oracle(x, static_cast<double>(k) / n, rng());
    const auto rep = learn_sparse_parity(make, n, k, 7, inner, default_feed_budget(n, k, inner), oracle, rng);
    EXPECT_FALSE(rep.halted);
    EXPECT_EQ(rep.estimate, x);
  }
}

TEST(Reductions, SparseLearnerHaltsWhenFeedRunsShort) {
  Rng rng(7);
  const auto make = distinguisher_factory("sparse_sat", {{"m0", 40}}, SourceSpec::sparse_parity(10, 2));
  const BitString x = uniform_bitstring(11, rng);
  SparseEquationOracle oracle(x, 0.2, 3);
  // A budget below inner_m can never forward enough samples.
  const auto rep = learn_sparse_parity(make, 10, 2, 3, 40, 20, oracle, rng);
  EXPECT_TRUE(rep.halted);
  EXPECT_TRUE(rep.estimate.none());
}
