#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "streamdist/distinguishers.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/sources.hpp"

namespace streamdist {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// A probability estimate with a confidence interval.
struct AdvantageEstimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t trials = 0;
};

/// Wilson score interval for `successes` out of `trials`.
AdvantageEstimate wilson(std::size_t successes, std::size_t trials, double z = kZ99);

/// p + 5 sqrt(p (1 - p) / trials).
double five_sigma_ceiling(double p, std::size_t trials);

/// Agresti-Coull variance of a proportion estimate.
double proportion_variance(std::size_t successes, std::size_t trials, double z = kZ99);

struct SuccessEstimate {
  /// (Pr[0 | null] + Pr[1 | planted]) / 2, pooled over both halves.
  AdvantageEstimate success;
  AdvantageEstimate null_correct;
  AdvantageEstimate planted_correct;
  double mean_samples = 0.0;
  /// Largest memory figures seen in any trial.
  MemoryReport memory;
};

/// Trial t uses the stream derive_seed(seed, t): the first half of the
/// trials (rounded down) are null, the rest planted. Each trial draws a fresh
/// instance, a fresh tester, and a stream of stream_len samples (default:
/// the tester's samples_needed()). Results do not depend on `threads`.
SuccessEstimate estimate_success(const DistinguisherFactory& make, const SourceSpec& spec,
                                 std::optional<std::size_t> stream_len, std::size_t trials, std::uint64_t seed,
                                 unsigned threads = 1);

struct HybridReport {
  /// q[j] = Pr[decide 0 | H_j], j = 0..m.
  std::vector<AdvantageEstimate> q;
  /// deltas[j-1] = q[j-1] - q[j], with a normal-approximation 99% interval.
  std::vector<AdvantageEstimate> deltas;
  double telescoped = 0.0;
  /// Pr[0 | all null] - Pr[0 | all planted] from independent runs.
  AdvantageEstimate direct_gap;
  double residual = 0.0;
  /// 99% half-width for the residual, combining all four estimates.
  double combined_half_width = 0.0;
  bool consistent = false;
};

/// Estimates every hybrid H_0..H_m of a local source with predicate p on n
/// seed bits, `trials` runs each, plus an independent direct estimate of the
/// end-to-end gap.
HybridReport hybrid_deltas(const DistinguisherFactory& make, const Predicate& p, std::size_t n, std::size_t m,
                           std::size_t trials, std::uint64_t seed, unsigned threads = 1);

}  // namespace streamdist
