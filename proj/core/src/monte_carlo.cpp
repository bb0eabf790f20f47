#include "streamdist/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "streamdist/parallel.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

AdvantageEstimate wilson(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson: no trials");
  if (successes > trials) throw std::invalid_argument("wilson: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  AdvantageEstimate e;
  e.point = p;
  e.ci_low = std::max(0.0, std::min(p, center - half));
  e.ci_high = std::min(1.0, std::max(p, center + half));
  e.trials = trials;
  return e;
}

double five_sigma_ceiling(double p, std::size_t trials) {
  return p + 5.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double proportion_variance(std::size_t successes, std::size_t trials, double z) {
  const double n = static_cast<double>(trials) + z * z;
  const double p = (static_cast<double>(successes) + z * z / 2.0) / n;
  return p * (1.0 - p) / n;
}

namespace {

struct TrialResult {
  bool correct = false;
  bool decided_zero = false;
  std::size_t samples = 0;
  MemoryReport memory;
};

}  // namespace

SuccessEstimate estimate_success(const DistinguisherFactory& make, const SourceSpec& spec,
                                 std::optional<std::size_t> stream_len, std::size_t trials, std::uint64_t seed,
                                 unsigned threads) {
  if (trials < 2) throw std::invalid_argument("estimate_success: need at least 2 trials");
  const std::size_t null_trials = trials / 2;
  std::vector<TrialResult> results(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const bool truth = t >= null_trials;
    const Instance inst = draw_instance(spec, rng, truth);
    auto d = make(rng());
    InstanceStream stream(inst, rng(), stream_len.value_or(d->samples_needed()));
    const bool out = run_distinguisher(*d, stream);
    results[t] = {out == truth, !out, stream.consumed(), d->memory()};
  });
  std::size_t null_ok = 0;
  std::size_t planted_ok = 0;
  double samples = 0.0;
  SuccessEstimate est;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    (t < null_trials ? null_ok : planted_ok) += r.correct ? 1 : 0;
    samples += static_cast<double>(r.samples);
    est.memory.data_bits = std::max(est.memory.data_bits, r.memory.data_bits);
    est.memory.declared_bound = std::max(est.memory.declared_bound, r.memory.declared_bound);
    est.memory.program_bits = std::max(est.memory.program_bits, r.memory.program_bits);
  }
  est.null_correct = wilson(null_ok, null_trials);
  est.planted_correct = wilson(planted_ok, trials - null_trials);
  est.success = wilson(null_ok + planted_ok, trials);
  est.mean_samples = samples / static_cast<double>(trials);
  return est;
}

HybridReport hybrid_deltas(const DistinguisherFactory& make, const Predicate& p, std::size_t n, std::size_t m,
                           std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (m == 0 || trials == 0) throw std::invalid_argument("hybrid_deltas: need m >= 1 and trials >= 1");
  const SourceSpec spec = SourceSpec::local_prg(n, p);
  // Hybrid j uses streams (j, t); the direct estimates use blocks m+1 and m+2.
  const std::size_t blocks = m + 3;
  std::vector<std::uint8_t> zero(blocks * trials);
  parallel_for(blocks * trials, threads, [&](std::size_t idx) {
    const std::size_t block = idx / trials;
    const std::size_t t = idx % trials;
    Rng rng(derive_seed(derive_seed(seed, block), t));
    const BitString x = uniform_bitstring(n, rng);
    std::size_t j = block;
    if (block == m + 1) j = 0;  // direct: all null
    if (block == m + 2) j = m;  // direct: all planted
    HybridStream stream(spec, x, j, m, rng());
    auto d = make(rng());
    zero[idx] = run_distinguisher(*d, stream) ? 0 : 1;
  });
  auto zeros_in = [&](std::size_t block) {
    std::size_t c = 0;
    for (std::size_t t = 0; t < trials; ++t) c += zero[block * trials + t];
    return c;
  };

  HybridReport rep;
  std::vector<std::size_t> counts(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    counts[j] = zeros_in(j);
    rep.q.push_back(wilson(counts[j], trials));
  }
  for (std::size_t j = 1; j <= m; ++j) {
    AdvantageEstimate d;
    d.point = rep.q[j - 1].point - rep.q[j].point;
    const double half =
        kZ99 * std::sqrt(proportion_variance(counts[j - 1], trials) + proportion_variance(counts[j], trials));
    d.ci_low = d.point - half;
    d.ci_high = d.point + half;
    d.trials = trials;
    rep.deltas.push_back(d);
  }
  rep.telescoped = 0.0;
  for (const auto& d : rep.deltas) rep.telescoped += d.point;

  const std::size_t null_zero = zeros_in(m + 1);
  const std::size_t planted_zero = zeros_in(m + 2);
  const double nt = static_cast<double>(trials);
  rep.direct_gap.point = static_cast<double>(null_zero) / nt - static_cast<double>(planted_zero) / nt;
  const double direct_var = proportion_variance(null_zero, trials) + proportion_variance(planted_zero, trials);
  rep.direct_gap.ci_low = rep.direct_gap.point - kZ99 * std::sqrt(direct_var);
  rep.direct_gap.ci_high = rep.direct_gap.point + kZ99 * std::sqrt(direct_var);
  rep.direct_gap.trials = trials;

  rep.residual = rep.telescoped - rep.direct_gap.point;
  rep.combined_half_width =
      kZ99 * std::sqrt(proportion_variance(counts[0], trials) + proportion_variance(counts[m], trials) + direct_var);
  rep.consistent = std::abs(rep.residual) <= rep.combined_half_width;
  return rep;
}

}  // namespace streamdist
