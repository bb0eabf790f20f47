#include "streamdist/reductions.hpp"

#include <cmath>
#include <stdexcept>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

EquationSample pull(SampleSource& oracle, std::size_t& consumed) {
  auto s = oracle.next();
  if (!s) throw InsufficientSamples("learner: equation oracle exhausted");
  ++consumed;
  auto* e = std::get_if<EquationSample>(&*s);
  if (!e) throw std::invalid_argument("learner: oracle must produce equation samples");
  return std::move(*e);
}

}  // namespace

ParityOracle::ParityOracle(BitString x, std::uint64_t seed, std::optional<std::size_t> budget)
    : x_(std::move(x)), rng_(seed), budget_(budget) {}

std::optional<Sample> ParityOracle::next() {
  if (budget_ && consumed_ >= *budget_) return std::nullopt;
  ++consumed_;
  BitString a = uniform_bitstring(x_.size(), rng_);
  const bool b = inner_product(a, x_);
  return EquationSample{std::move(a), b};
}

SparseEquationOracle::SparseEquationOracle(BitString x, double rate, std::uint64_t seed,
                                           std::optional<std::size_t> budget)
    : x_(std::move(x)), rate_(rate), rng_(seed), budget_(budget) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::domain_error("SparseEquationOracle: rate outside [0, 1]");
}

std::optional<Sample> SparseEquationOracle::next() {
  if (budget_ && consumed_ >= *budget_) return std::nullopt;
  ++consumed_;
  BitString a = sample_sparse_vector(x_.size(), rate_, rng_);
  const bool b = inner_product(a, x_);
  return EquationSample{std::move(a), b};
}

BitString parity_transform(const EquationSample& s, std::size_t i, bool g, const Gf2Matrix& m) {
  const std::size_t kp = s.a.size();
  const std::size_t n = m.n_cols();
  if (i >= kp) throw std::out_of_range("parity_transform: bit index beyond k'");
  if (kp > n || m.n_rows() != n) throw DimensionError("parity_transform: need k' <= n and square M");
  BitString z(n);
  std::size_t out = 0;
  for (std::size_t h = 0; h < kp; ++h) {
    if (h == i) continue;
    z.set(out++, s.a.test(h));
  }
  z.set(out, s.b ^ (g && s.a.test(i)));
  return m.multiply(z);
}

EquationSample sparse_transform(const EquationSample& s, std::size_t i, bool g, const BitString& y) {
  const std::size_t np = s.a.size();
  if (np < 2) throw DimensionError("sparse_transform: equations need at least two variables");
  if (i >= np) throw std::out_of_range("sparse_transform: bit index beyond n + 1");
  if (y.size() != np - 1) throw DimensionError("sparse_transform: y must have length n");
  BitString rest(np - 1);
  std::size_t out = 0;
  for (std::size_t h = 0; h < np; ++h) {
    if (h == i) continue;
    rest.set(out++, s.a.test(h));
  }
  const bool b = s.b ^ (g && s.a.test(i)) ^ inner_product(rest, y);
  return EquationSample{std::move(rest), b};
}

double sparse_subsample_rate(std::size_t n, std::size_t k) {
  if (k == 0 || 2 * k > n) throw std::domain_error("sparse reduction needs 0 < k <= n / 2");
  return static_cast<double>(k) / static_cast<double>(n - k);
}

Rational sparse_feed_probability_exact(std::size_t n, std::size_t k) {
  if (k == 0 || 2 * k > n) throw std::domain_error("sparse reduction needs 0 < k <= n / 2");
  const Rational p(static_cast<long long>(k), static_cast<long long>(n));
  const Rational sub(static_cast<long long>(k), static_cast<long long>(n - k));
  return p + sub * (1 - p);
}

double sparse_feed_probability(std::size_t n, std::size_t k) {
  const double p = static_cast<double>(k) / static_cast<double>(n);
  return p + sparse_subsample_rate(n, k) * (1.0 - p);
}

std::size_t default_feed_budget(std::size_t n, std::size_t k, std::size_t inner_m, double s_assumed) {
  if (k == 0 || !(s_assumed > 0.0)) throw std::domain_error("default_feed_budget: need k > 0 and s > 0");
  const double slack = 16.0 * std::log(static_cast<double>(n) / s_assumed);
  return static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) / static_cast<double>(k) * (static_cast<double>(inner_m) + slack)));
}

std::size_t chernoff_reps(double advantage, double failure) {
  if (!(advantage > 0.0) || !(failure > 0.0 && failure < 1.0)) {
    throw std::domain_error("chernoff_reps: need advantage > 0 and failure in (0, 1)");
  }
  return static_cast<std::size_t>(std::ceil(std::log(1.0 / failure) / (2.0 * advantage * advantage)));
}

double majority_success_probability(double q, std::size_t reps) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("majority_success_probability: q outside [0, 1]");
  // Correct iff strictly more than half the votes are correct.
  KahanSum total;
  for (std::size_t c = reps / 2 + 1; c <= reps; ++c) {
    const double log_term = std::lgamma(static_cast<double>(reps) + 1) - std::lgamma(static_cast<double>(c) + 1) -
                            std::lgamma(static_cast<double>(reps - c) + 1) +
                            (c ? static_cast<double>(c) * std::log(q) : 0.0) +
                            (reps - c ? static_cast<double>(reps - c) * std::log1p(-q) : 0.0);
    total += std::exp(log_term);
  }
  return total.value();
}

LearnerReport learn_parity(const DistinguisherFactory& make_tester, std::size_t n, std::size_t k_prime,
                           std::size_t reps, std::size_t inner_m, SampleSource& oracle, Rng& rng) {
  if (k_prime < 1 || k_prime > n) throw std::invalid_argument("learn_parity: need 1 <= k' <= n");
  if (reps == 0 || inner_m == 0) throw std::invalid_argument("learn_parity: reps and inner_m must be positive");
  LearnerReport report{BitString(k_prime), {}, false, 0, {}};
  report.log.reserve(k_prime * reps);
  for (std::size_t i = 0; i < k_prime; ++i) {
    std::size_t count[2] = {0, 0};
    for (std::size_t r = 0; r < reps; ++r) {
      const bool g = rng.bit();
      const Gf2Matrix m = sample_full_rank_map(n, rng);
      auto tester = make_tester(rng());
      for (std::size_t t = 0; t < inner_m; ++t) {
        const EquationSample s = pull(oracle, report.samples_consumed);
        if (s.a.size() != k_prime) throw DimensionError("learn_parity: equation length != k'");
        tester->feed(VectorSample{parity_transform(s, i, g, m)});
      }
      const bool output = tester->decide();
      const bool credited = step4_vote(output, g);
      ++count[credited];
      report.log.push_back({i, g, output, credited});
    }
    report.votes.emplace_back(count[0], count[1]);
    report.estimate.set(i, majority_bit(count[0], count[1]));
  }
  return report;
}

LearnerReport learn_sparse_parity(const DistinguisherFactory& make_tester, std::size_t n, std::size_t k,
                                  std::size_t reps, std::size_t inner_m, std::size_t feed_budget,
                                  SampleSource& oracle, Rng& rng) {
  const double sub = sparse_subsample_rate(n, k);
  if (reps == 0 || inner_m == 0) throw std::invalid_argument("learn_sparse_parity: reps and inner_m must be positive");
  const std::size_t n_prime = n + 1;
  LearnerReport report{BitString(n_prime), {}, false, 0, {}};
  report.log.reserve(n_prime * reps);
  for (std::size_t i = 0; i < n_prime; ++i) {
    std::size_t count[2] = {0, 0};
    for (std::size_t r = 0; r < reps; ++r) {
      const bool g = rng.bit();
      const BitString y = uniform_bitstring(n, rng);
      auto tester = make_tester(rng());
      std::size_t forwarded = 0;
      for (std::size_t t = 0; t < feed_budget; ++t) {
        const EquationSample s = pull(oracle, report.samples_consumed);
        if (s.a.size() != n_prime) throw DimensionError("learn_sparse_parity: equation length != n + 1");
        if (!s.a.test(i) && !rng.bernoulli(sub)) continue;
        ++forwarded;
        tester->feed(sparse_transform(s, i, g, y));
      }
      if (forwarded < inner_m) {
        report.halted = true;
        report.votes.emplace_back(count[0], count[1]);
        report.estimate = BitString(n_prime);
        return report;
      }
      const bool output = tester->decide();
      const bool credited = step4_vote(output, g);
      ++count[credited];
      report.log.push_back({i, g, output, credited});
    }
    report.votes.emplace_back(count[0], count[1]);
    report.estimate.set(i, majority_bit(count[0], count[1]));
  }
  return report;
}

}  // namespace streamdist
