#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "streamdist/bitstring.hpp"
#include "streamdist/distinguishers.hpp"
#include "streamdist/gf2.hpp"
#include "streamdist/numeric.hpp"
#include "streamdist/rng.hpp"
#include "streamdist/sources.hpp"

namespace streamdist {

/// Labelled equations (a, <a, x>) with a uniform in {0,1}^{|x|}.
/// Returns nullopt after `budget` samples if one is set.
class ParityOracle final : public SampleSource {
 public:
  ParityOracle(BitString x, std::uint64_t seed, std::optional<std::size_t> budget = std::nullopt);
  std::optional<Sample> next() override;

 private:
  BitString x_;
  Rng rng_;
  std::optional<std::size_t> budget_;
};

/// Labelled equations (a, <a, x>) with every a^h ~ Ber(rate).
class SparseEquationOracle final : public SampleSource {
 public:
  SparseEquationOracle(BitString x, double rate, std::uint64_t seed, std::optional<std::size_t> budget = std::nullopt);
  std::optional<Sample> next() override;

 private:
  BitString x_;
  double rate_;
  Rng rng_;
  std::optional<std::size_t> budget_;
};

/// Which counter a vote increments: output 0 credits 1 - g, output 1 credits g.
constexpr bool step4_vote(bool output, bool g) noexcept { return output ? g : !g; }

/// 0 if count0 > count1, else 1. Ties go to 1.
constexpr bool majority_bit(std::size_t count0, std::size_t count1) noexcept { return !(count0 > count1); }

/// M * (a^{-i}, b + g a^i, 0, ..., 0). `a` has length k' <= n and M is n x n.
BitString parity_transform(const EquationSample& s, std::size_t i, bool g, const Gf2Matrix& m);

/// (a^{-i}, b + g a^i + <a^{-i}, y>), dropping coordinate i of a. y has
/// length |a| - 1.
EquationSample sparse_transform(const EquationSample& s, std::size_t i, bool g, const BitString& y);

/// Probability of forwarding a sample whose coordinate i is 0: k / (n - k).
double sparse_subsample_rate(std::size_t n, std::size_t k);
/// Pr[a sample is forwarded] = k/n + (k/(n-k)) (1 - k/n), exact and in
/// double precision.
Rational sparse_feed_probability_exact(std::size_t n, std::size_t k);
double sparse_feed_probability(std::size_t n, std::size_t k);

/// Samples scanned per vote: ceil((n/k) (inner_m + 16 ln(n / s_assumed))).
std::size_t default_feed_budget(std::size_t n, std::size_t k, std::size_t inner_m, double s_assumed = 0.25);

/// Repetitions so that a majority of votes, each correct with probability
/// 1/2 + advantage, errs with probability at most `failure` (Hoeffding).
std::size_t chernoff_reps(double advantage, double failure);

/// Exact probability that the majority of `reps` independent votes, each
/// correct with probability q, is correct (ties resolved against the truth).
double majority_success_probability(double q, std::size_t reps);

struct VoteRecord {
  std::size_t bit = 0;
  bool g = false;
  bool output = false;
  /// The counter that was incremented.
  bool credited = false;
};

struct LearnerReport {
  BitString estimate;
  /// (count0, count1) for every bit that was processed.
  std::vector<std::pair<std::size_t, std::size_t>> votes;
  bool halted = false;
  std::size_t samples_consumed = 0;
  std::vector<VoteRecord> log;
};

/// Learns x in {0,1}^{k'} from parity equations by asking a tester for
/// (k'-1)- versus k'-dimensional subspaces of {0,1}^n about each bit.
/// Each vote uses a fresh tester, a fresh guess g and a fresh invertible M,
/// and feeds it inner_m transformed samples. The tester must output 1 for
/// the lower-dimensional case.
LearnerReport learn_parity(const DistinguisherFactory& make_tester, std::size_t n, std::size_t k_prime,
                           std::size_t reps, std::size_t inner_m, SampleSource& oracle, Rng& rng);

/// Learns x in {0,1}^{n+1} from Ber(k/n) equations using a satisfiable-
/// versus-random tester on n variables (output 1 = satisfiable). Each vote
/// scans feed_budget samples, forwarding those with a^i = 1 and the rest
/// with probability k/(n-k). If fewer than inner_m are forwarded the run
/// halts and reports the all-zero estimate.
LearnerReport learn_sparse_parity(const DistinguisherFactory& make_tester, std::size_t n, std::size_t k,
                                  std::size_t reps, std::size_t inner_m, std::size_t feed_budget,
                                  SampleSource& oracle, Rng& rng);

}  // namespace streamdist
