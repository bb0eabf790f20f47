#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamdist/bitstring.hpp"
#include "streamdist/numeric.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

BigInt binomial(std::size_t n, std::size_t k);

/// K_l(w; n) = sum_j (-1)^j C(w, j) C(n - w, l - j). For |alpha| = w,
/// E_{x in T_l} (-1)^{<alpha, x>} = K_l(w; n) / C(n, l).
BigInt krawtchouk(std::size_t n, std::size_t l, std::size_t w);

/// |{alpha : |E_{x in T_l} (-1)^{<alpha, x>}| > delta}|, exact. The double
/// delta is compared at its exact binary value.
BigInt bias_set_size(std::size_t n, std::size_t l, double delta);

/// Smallest delta covered by the set-size bound: (8l/n)^{l/2}.
double bias_set_delta_min(std::size_t n, std::size_t l);
/// 2 e^{-delta^{2/l} n / 8} 2^n.
double bias_set_bound(std::size_t n, std::size_t l, double delta);
/// `points` evenly spaced deltas from bias_set_delta_min to 1 inclusive.
std::vector<double> bias_set_delta_grid(std::size_t n, std::size_t l, std::size_t points);

struct BiasSetCheck {
  std::size_t n = 0;
  std::size_t l = 0;
  double delta = 0.0;
  BigInt size;
  double bound = 0.0;
  bool pass = false;
};

std::vector<BiasSetCheck> check_bias_set_bound(std::size_t n, std::size_t l, std::size_t points);

/// Distribution over {0,1}^n with integer weights; Pr[x] = weight(x) / total.
/// Index bit i is coordinate i of x.
class SeedDistribution {
 public:
  SeedDistribution(std::size_t n, std::vector<std::uint64_t> weights);

  static SeedDistribution uniform(std::size_t n);
  static SeedDistribution point_mass(std::size_t n, std::uint64_t x);
  /// Uniform over the listed (distinct) points.
  static SeedDistribution uniform_on(std::size_t n, const std::vector<std::uint64_t>& support);
  /// Uniform over a random subset of the given size.
  static SeedDistribution random_subset(std::size_t n, std::size_t size, Rng& rng);
  /// Independent weights uniform in [1, max_weight].
  static SeedDistribution random_weights(std::size_t n, std::uint64_t max_weight, Rng& rng);

  std::size_t n() const noexcept { return n_; }
  const std::vector<std::uint64_t>& weights() const noexcept { return weights_; }
  std::uint64_t total() const noexcept { return total_; }
  double probability(std::uint64_t x) const;

  double max_weight() const;
  Rational max_weight_exact() const;
  /// -log2(max weight).
  double min_entropy() const;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> weights_;
  std::uint64_t total_ = 0;
};

enum class ShellMethod {
  /// Direct sum over the shell and the support.
  brute,
  /// sum_z A(z) K_l(|z|) / C(n, l) with A the autocorrelation of the weights.
  autocorrelation,
};

/// E_{a in T_l} (sum_x Pr[x] (-1)^{<a, x>})^2.
double squared_shell_bias(const SeedDistribution& dist, std::size_t l, ShellMethod method = ShellMethod::brute);
Rational squared_shell_bias_exact(const SeedDistribution& dist, std::size_t l);

struct PredicateBias {
  /// E_{a in [n]^(k)} (sum_x Pr[x] (-1)^{P(x^a)})^2
  Rational mean_square_exact;
  double mean_square = 0.0;
  /// Bias for every ordered tuple, in tuple_rank order.
  std::vector<double> biases;

  /// Fraction of tuples with |bias| > threshold.
  double fraction_above(double threshold) const;
};

/// Exhaustive over [n]^(k). Throws BudgetExceeded above 10^7 tuples or
/// 10^10 elementary steps.
PredicateBias predicate_source_bias(const SeedDistribution& dist, const Predicate& p);

/// eps is admissible iff 0 < eps < 1 - 3 log 24 / log n.
bool high_entropy_eps_admissible(std::size_t n, double eps);
/// 2 (n/l)^{-(1-eps) l / 3}.
double high_entropy_shell_bound(std::size_t n, std::size_t l, double eps);
/// Largest seed probability the high-entropy bound assumes: 2^{n^eps - n} (n/l)^l.
double high_entropy_max_weight(std::size_t n, std::size_t l, double eps);

/// min over the delta grid of max_x Pr[x] |B_{T_l}(delta)| + delta: an upper
/// bound on squared_shell_bias that holds for every distribution.
double shell_chain_bound(const SeedDistribution& dist, std::size_t l, std::size_t points = 20);

struct ShellBiasCheck {
  double measured = 0.0;
  double chain_bound = 0.0;
  bool chain_pass = false;
  /// Set when the high-entropy bound applies; otherwise skip_reason says why.
  std::optional<double> entropy_bound;
  std::optional<bool> entropy_pass;
  std::string skip_reason;
};

ShellBiasCheck check_shell_bias(const SeedDistribution& dist, std::size_t l, double eps);

/// n^{-(1-eps) t / 6}, the scale of the mean-square predicate bias.
double predicate_bias_scale(std::size_t n, std::size_t t, double eps);
/// n^{-(1-eps) t / 18}, the scale of a single tuple's bias.
double predicate_bias_tail_scale(std::size_t n, std::size_t t, double eps);
/// Smallest c with |bias| <= c * scale for all but a c * scale fraction of
/// tuples. Reported, not asserted: the constant is never pinned.
double predicate_bias_constant(const PredicateBias& bias, double scale);

}  // namespace streamdist
