#include "streamdist/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "streamdist/errors.hpp"
#include "streamdist/gf2.hpp"

namespace streamdist {

namespace {

constexpr std::size_t kMaxDenseN = 24;

void fwht(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

/// Calls f(mask) for every n-bit mask of weight l, in increasing order.
template <class F>
void for_each_shell(std::size_t n, std::size_t l, F&& f) {
  if (l > n) return;
  if (l == 0) {
    f(std::uint64_t{0});
    return;
  }
  std::uint64_t mask = (std::uint64_t{1} << l) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (mask < limit) {
    f(mask);
    // Gosper's hack: next larger integer with the same popcount.
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
}

}  // namespace

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt out = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

BigInt krawtchouk(std::size_t n, std::size_t l, std::size_t w) {
  if (l > n || w > n) throw std::out_of_range("krawtchouk: need l, w <= n");
  BigInt out = 0;
  for (std::size_t j = 0; j <= std::min(w, l); ++j) {
    const BigInt term = binomial(w, j) * binomial(n - w, l - j);
    if (j % 2) {
      out -= term;
    } else {
      out += term;
    }
  }
  return out;
}

BigInt bias_set_size(std::size_t n, std::size_t l, double delta) {
  if (l > n) throw std::out_of_range("bias_set_size: l exceeds n");
  if (!(delta > 0.0)) throw std::domain_error("bias_set_size: delta must be positive");
  const Rational d = exact_rational(delta);
  const BigInt shell = binomial(n, l);
  const BigInt num = boost::multiprecision::numerator(d);
  const BigInt den = boost::multiprecision::denominator(d);
  BigInt out = 0;
  for (std::size_t w = 0; w <= n; ++w) {
    // |K| / C > num / den
    if (boost::multiprecision::abs(krawtchouk(n, l, w)) * den > num * shell) out += binomial(n, w);
  }
  return out;
}

double bias_set_delta_min(std::size_t n, std::size_t l) {
  return std::pow(8.0 * static_cast<double>(l) / static_cast<double>(n), static_cast<double>(l) / 2.0);
}

double bias_set_bound(std::size_t n, std::size_t l, double delta) {
  return 2.0 * std::exp(-std::pow(delta, 2.0 / static_cast<double>(l)) * static_cast<double>(n) / 8.0) *
         std::ldexp(1.0, static_cast<int>(n));
}

std::vector<double> bias_set_delta_grid(std::size_t n, std::size_t l, std::size_t points) {
  const double lo = bias_set_delta_min(n, l);
  if (lo > 1.0) return {};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = points == 1 ? lo : lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  if (points) grid.back() = 1.0;
  return grid;
}

std::vector<BiasSetCheck> check_bias_set_bound(std::size_t n, std::size_t l, std::size_t points) {
  std::vector<BiasSetCheck> out;
  for (double delta : bias_set_delta_grid(n, l, points)) {
    BiasSetCheck c;
    c.n = n;
    c.l = l;
    c.delta = delta;
    c.size = bias_set_size(n, l, delta);
    c.bound = bias_set_bound(n, l, delta);
    c.pass = Rational(c.size) <= exact_rational(c.bound);
    out.push_back(std::move(c));
  }
  return out;
}

// ---- SeedDistribution ----

SeedDistribution::SeedDistribution(std::size_t n, std::vector<std::uint64_t> weights)
    : n_(n), weights_(std::move(weights)) {
  if (n == 0 || n > kMaxDenseN) throw std::domain_error("SeedDistribution: need 1 <= n <= 24");
  if (weights_.size() != (std::size_t{1} << n)) throw DimensionError("SeedDistribution: need 2^n weights");
  for (auto w : weights_) {
    if (total_ + w < total_) throw std::overflow_error("SeedDistribution: total weight overflows");
    total_ += w;
  }
  if (total_ == 0) throw std::invalid_argument("SeedDistribution: all weights are zero");
}

SeedDistribution SeedDistribution::uniform(std::size_t n) {
  if (n == 0 || n > kMaxDenseN) throw std::domain_error("SeedDistribution: need 1 <= n <= 24");
  return SeedDistribution(n, std::vector<std::uint64_t>(std::size_t{1} << n, 1));
}

SeedDistribution SeedDistribution::point_mass(std::size_t n, std::uint64_t x) {
  if (n == 0 || n > kMaxDenseN) throw std::domain_error("SeedDistribution: need 1 <= n <= 24");
  std::vector<std::uint64_t> w(std::size_t{1} << n, 0);
  w.at(x) = 1;
  return SeedDistribution(n, std::move(w));
}

SeedDistribution SeedDistribution::uniform_on(std::size_t n, const std::vector<std::uint64_t>& support) {
  if (n == 0 || n > kMaxDenseN) throw std::domain_error("SeedDistribution: need 1 <= n <= 24");
  std::vector<std::uint64_t> w(std::size_t{1} << n, 0);
  for (auto x : support) {
    if (w.at(x)) throw std::invalid_argument("SeedDistribution::uniform_on: repeated point");
    w[x] = 1;
  }
  return SeedDistribution(n, std::move(w));
}

SeedDistribution SeedDistribution::random_subset(std::size_t n, std::size_t size, Rng& rng) {
  if (n == 0 || n > kMaxDenseN) throw std::domain_error("SeedDistribution: need 1 <= n <= 24");
  const std::size_t universe = std::size_t{1} << n;
  if (size == 0 || size > universe) throw std::invalid_argument("random_subset: size outside [1, 2^n]");
  std::vector<std::uint64_t> pool(universe);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.uniform_below(universe - i)]);
  pool.resize(size);
  return uniform_on(n, pool);
}

SeedDistribution SeedDistribution::random_weights(std::size_t n, std::uint64_t max_weight, Rng& rng) {
  if (n == 0 || n > kMaxDenseN) throw std::domain_error("SeedDistribution: need 1 <= n <= 24");
  if (max_weight == 0) throw std::invalid_argument("random_weights: max_weight must be positive");
  std::vector<std::uint64_t> w(std::size_t{1} << n);
  for (auto& v : w) v = 1 + rng.uniform_below(max_weight);
  return SeedDistribution(n, std::move(w));
}

double SeedDistribution::probability(std::uint64_t x) const {
  return static_cast<double>(weights_.at(x)) / static_cast<double>(total_);
}

double SeedDistribution::max_weight() const {
  return static_cast<double>(*std::max_element(weights_.begin(), weights_.end())) / static_cast<double>(total_);
}

Rational SeedDistribution::max_weight_exact() const {
  return Rational(BigInt(*std::max_element(weights_.begin(), weights_.end())), BigInt(total_));
}

double SeedDistribution::min_entropy() const { return -std::log2(max_weight()); }

// ---- shell biases ----

Rational squared_shell_bias_exact(const SeedDistribution& dist, std::size_t l) {
  const std::size_t n = dist.n();
  if (l > n) throw std::out_of_range("squared_shell_bias: l exceeds n");
  const double cost = static_cast<double>(binomial(n, l)) * std::ldexp(1.0, static_cast<int>(n));
  if (cost > 1e10) throw BudgetExceeded("squared_shell_bias: shell times support exceeds 10^10");
  const auto& w = dist.weights();
  BigInt sum_sq = 0;
  std::uint64_t shell_size = 0;
  for_each_shell(n, l, [&](std::uint64_t a) {
    // Signed sum fits: |s| <= total < 2^63 for any sensible distribution.
    __extension__ __int128 s = 0;
    for (std::uint64_t x = 0; x < w.size(); ++x) {
      if (!w[x]) continue;
      if (std::popcount(a & x) & 1) {
        s -= w[x];
      } else {
        s += w[x];
      }
    }
    const auto mag = static_cast<std::uint64_t>(s < 0 ? -s : s);
    sum_sq += BigInt(mag) * mag;
    ++shell_size;
  });
  const BigInt total = dist.total();
  return Rational(sum_sq, total * total * shell_size);
}

double squared_shell_bias(const SeedDistribution& dist, std::size_t l, ShellMethod method) {
  const std::size_t n = dist.n();
  if (l > n) throw std::out_of_range("squared_shell_bias: l exceeds n");
  if (method == ShellMethod::brute) return static_cast<double>(squared_shell_bias_exact(dist, l));

  if (n > 22) throw BudgetExceeded("squared_shell_bias: n above 22");
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> spec(size);
  for (std::size_t x = 0; x < size; ++x) spec[x] = dist.probability(x);
  fwht(spec);
  // Autocorrelation A(z) = sum_x w(x) w(x + z) = 2^-n sum_alpha W(alpha)^2 (-1)^{<alpha, z>}.
  for (auto& v : spec) v *= v;
  fwht(spec);
  std::vector<double> weight_by_w(n + 1);
  const double shell = static_cast<double>(binomial(n, l));
  for (std::size_t wt = 0; wt <= n; ++wt) weight_by_w[wt] = static_cast<double>(krawtchouk(n, l, wt)) / shell;
  KahanSum total;
  const double scale = std::ldexp(1.0, -static_cast<int>(n));
  for (std::size_t z = 0; z < size; ++z) total += spec[z] * scale * weight_by_w[std::popcount(z)];
  return total.value();
}

double PredicateBias::fraction_above(double threshold) const {
  if (biases.empty()) return 0.0;
  std::size_t count = 0;
  for (double b : biases) {
    if (std::abs(b) > threshold) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(biases.size());
}

PredicateBias predicate_source_bias(const SeedDistribution& dist, const Predicate& p) {
  const std::size_t n = dist.n();
  const std::size_t k = p.arity();
  if (k > n) throw std::invalid_argument("predicate_source_bias: arity exceeds n");
  const std::uint64_t tuples = falling_factorial(n, k);
  if (tuples > 10'000'000) throw BudgetExceeded("predicate_source_bias: more than 10^7 tuples");
  if (static_cast<double>(tuples) * std::ldexp(1.0, static_cast<int>(n)) > 1e10) {
    throw BudgetExceeded("predicate_source_bias: tuples times support exceeds 10^10");
  }
  const auto& w = dist.weights();
  const auto& table = p.truth_table();
  PredicateBias out;
  out.biases.resize(tuples);
  BigInt sum_sq = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> support;
  for (std::uint64_t x = 0; x < w.size(); ++x) {
    if (w[x]) support.emplace_back(x, w[x]);
  }
  std::vector<std::uint64_t> pattern_mass(std::size_t{1} << k);
  for (std::uint64_t r = 0; r < tuples; ++r) {
    const OrderedTuple a = tuple_unrank(r, n, k);
    std::fill(pattern_mass.begin(), pattern_mass.end(), 0);
    for (const auto& [x, wx] : support) {
      std::uint32_t index = 0;
      for (std::size_t i = 0; i < k; ++i) index = (index << 1) | static_cast<std::uint32_t>((x >> a[i]) & 1U);
      pattern_mass[index] += wx;
    }
    __extension__ __int128 s = 0;
    for (std::size_t idx = 0; idx < pattern_mass.size(); ++idx) {
      if (table[idx]) {
        s -= pattern_mass[idx];
      } else {
        s += pattern_mass[idx];
      }
    }
    const auto mag = static_cast<std::uint64_t>(s < 0 ? -s : s);
    sum_sq += BigInt(mag) * mag;
    out.biases[r] = static_cast<double>(static_cast<long double>(s) / static_cast<long double>(dist.total()));
  }
  const BigInt total = dist.total();
  out.mean_square_exact = Rational(sum_sq, total * total * tuples);
  out.mean_square = static_cast<double>(out.mean_square_exact);
  return out;
}

// ---- high-entropy shell bound ----

bool high_entropy_eps_admissible(std::size_t n, double eps) {
  const double upper = 1.0 - 3.0 * std::log(24.0) / std::log(static_cast<double>(n));
  return eps > 0.0 && eps < upper;
}

double high_entropy_shell_bound(std::size_t n, std::size_t l, double eps) {
  const double ratio = static_cast<double>(n) / static_cast<double>(l);
  return 2.0 * std::pow(ratio, -(1.0 - eps) * static_cast<double>(l) / 3.0);
}

double high_entropy_max_weight(std::size_t n, std::size_t l, double eps) {
  const double ratio = static_cast<double>(n) / static_cast<double>(l);
  return std::exp2(std::pow(static_cast<double>(n), eps) - static_cast<double>(n)) *
         std::pow(ratio, static_cast<double>(l));
}

double shell_chain_bound(const SeedDistribution& dist, std::size_t l, std::size_t points) {
  const double top = dist.max_weight();
  double best = 1.0;  // the squared bias never exceeds 1
  for (double delta : bias_set_delta_grid(dist.n(), l, points)) {
    best = std::min(best, top * static_cast<double>(bias_set_size(dist.n(), l, delta)) + delta);
  }
  return best;
}

ShellBiasCheck check_shell_bias(const SeedDistribution& dist, std::size_t l, double eps) {
  ShellBiasCheck c;
  const std::size_t n = dist.n();
  c.measured = squared_shell_bias(dist, l);
  c.chain_bound = shell_chain_bound(dist, l);
  // Float slack for the double-valued bound.
  c.chain_pass = c.measured <= c.chain_bound * (1.0 + 1e-12);
  if (!high_entropy_eps_admissible(n, eps)) {
    c.skip_reason = "eps outside (0, 1 - 3 log 24 / log n)";
    return c;
  }
  if (bias_set_delta_min(n, l) > std::pow(static_cast<double>(n) / static_cast<double>(l),
                                          -(1.0 - eps) * static_cast<double>(l) / 3.0)) {
    c.skip_reason = "l too large relative to n";
    return c;
  }
  if (dist.max_weight() > high_entropy_max_weight(n, l, eps)) {
    c.skip_reason = "distribution exceeds the max-weight precondition";
    return c;
  }
  c.entropy_bound = high_entropy_shell_bound(n, l, eps);
  c.entropy_pass = c.measured <= *c.entropy_bound;
  return c;
}

double predicate_bias_scale(std::size_t n, std::size_t t, double eps) {
  return std::pow(static_cast<double>(n), -(1.0 - eps) * static_cast<double>(t) / 6.0);
}

double predicate_bias_tail_scale(std::size_t n, std::size_t t, double eps) {
  return std::pow(static_cast<double>(n), -(1.0 - eps) * static_cast<double>(t) / 18.0);
}

double predicate_bias_constant(const PredicateBias& bias, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("predicate_bias_constant: scale must be positive");
  std::vector<double> mags;
  mags.reserve(bias.biases.size());
  for (double b : bias.biases) mags.push_back(std::abs(b));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const auto total = static_cast<double>(mags.size());
  // Excluding the j largest needs c >= j / (scale N) and c >= mags[j] / scale.
  double best = mags.empty() ? 0.0 : mags.front() / scale;
  for (std::size_t j = 1; j <= mags.size(); ++j) {
    const double excluded = static_cast<double>(j) / (scale * total);
    const double rest = j < mags.size() ? mags[j] / scale : 0.0;
    best = std::min(best, std::max(excluded, rest));
  }
  return best;
}

}  // namespace streamdist
