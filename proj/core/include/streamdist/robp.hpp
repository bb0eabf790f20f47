#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "streamdist/bitstring.hpp"
#include "streamdist/numeric.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

struct Vertex {
  bool is_leaf = false;
  /// Output of a leaf: a bit for distinguishing programs, a seed index
  /// for learning programs.
  std::int64_t label = 0;
  /// Target in the next layer for each alphabet symbol (non-leaves only).
  std::vector<std::uint32_t> next;

  static Vertex leaf(std::int64_t label) { return Vertex{true, label, {}}; }
  static Vertex inner(std::vector<std::uint32_t> next) { return Vertex{false, 0, std::move(next)}; }
};

/// Layered read-once branching program. Layer 0 holds only the start
/// vertex; every vertex of the last layer is a leaf; earlier layers may
/// also contain leaves, which stop the computation. Samples are integer
/// codes below alphabet_size(). A learning program uses the alphabet
/// A x {0,1} coded as 2 * a + b.
class Robp {
 public:
  Robp(std::uint64_t alphabet_size, std::vector<std::vector<Vertex>> layers);

  /// Number of edges on the longest path (layers - 1).
  std::size_t length() const noexcept { return layers_.size() - 1; }
  /// Largest layer size.
  std::size_t width() const noexcept;
  std::uint64_t alphabet_size() const noexcept { return alphabet_; }
  std::size_t layer_size(std::size_t j) const { return layers_.at(j).size(); }
  const Vertex& vertex(std::size_t j, std::size_t v) const { return layers_.at(j).at(v); }
  const std::vector<std::vector<Vertex>>& layers() const noexcept { return layers_; }

  /// Label of the leaf reached. Throws InsufficientSamples if the input
  /// ends before a leaf and std::out_of_range for a symbol outside the
  /// alphabet.
  std::int64_t run(std::span<const std::uint64_t> samples) const;

  /// Text form:
  ///   robp <m> <alphabet>
  ///   widths <w_0> ... <w_m>
  /// then one line per vertex, layer by layer: "leaf <label>" or the
  /// targets of symbols 0..alphabet-1.
  void write(std::ostream& out) const;
  static Robp read(std::istream& in);

  friend bool operator==(const Robp& a, const Robp& b) {
    if (a.alphabet_ != b.alphabet_ || a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t j = 0; j < a.layers_.size(); ++j) {
      if (a.layers_[j].size() != b.layers_[j].size()) return false;
      for (std::size_t v = 0; v < a.layers_[j].size(); ++v) {
        const auto& x = a.layers_[j][v];
        const auto& y = b.layers_[j][v];
        if (x.is_leaf != y.is_leaf || (x.is_leaf ? x.label != y.label : x.next != y.next)) return false;
      }
    }
    return true;
  }

 private:
  std::uint64_t alphabet_;
  std::vector<std::vector<Vertex>> layers_;
};

/// Seeds X = {0, ..., seed_count - 1}, alphabet A = {0, ..., alphabet - 1},
/// null distribution D0 and planted distributions D1(x). When `denominator`
/// is nonzero, the exact form is d0_num / denominator and
/// d1_num[x] / denominator, and each row sums to the denominator.
struct FiniteDistinguishingProblem {
  std::size_t seed_count = 0;
  std::uint64_t alphabet = 0;
  std::vector<double> d0;
  std::vector<std::vector<double>> d1;
  std::uint64_t denominator = 0;
  std::vector<std::uint64_t> d0_num;
  std::vector<std::vector<std::uint64_t>> d1_num;

  bool has_exact() const noexcept { return denominator != 0; }
  /// Shapes agree and every distribution sums to 1 within 2^-40.
  void validate() const;

  /// Seeds are x in {0,1}^n with bit i of the index equal to x bit i.
  /// Symbols follow alphabet_code for local samples.
  static FiniteDistinguishingProblem local_prg(std::size_t n, const Predicate& p);
  /// Seeds are the k-dimensional subspaces of {0,1}^n in a fixed
  /// enumeration order; symbols are vector values.
  static FiniteDistinguishingProblem subspace(std::size_t n, std::size_t k);
};

/// All k-dimensional subspaces of {0,1}^n, each as the sorted list of its
/// 2^k element values. Ordered by pivot set, then by free entries.
std::vector<std::vector<std::uint64_t>> enumerate_subspaces(std::size_t n, std::size_t k);

inline constexpr double kDefaultRobpBudget = 1e9;

/// Elementary updates needed by exact_success.
double exact_success_cost(const Robp& p, const FiniteDistinguishingProblem& prob);

/// Pr[output = b] with b uniform, x uniform, samples iid from D0 or D1(x).
/// Parallel over x with a fixed-order reduction, so the result does not
/// depend on `threads`. Throws BudgetExceeded above `budget` updates.
double exact_success(const Robp& p, const FiniteDistinguishingProblem& prob, double budget = kDefaultRobpBudget,
                     unsigned threads = 1);

/// Same quantity in exact rational arithmetic. Requires the exact form and
/// seed_count * alphabet <= 2^16.
Rational exact_success_rational(const Robp& p, const FiniteDistinguishingProblem& prob);

/// Pr[output = x] for x uniform and samples iid from D1(x), treating the
/// program as a learner. Requires seed_count <= 2^16.
double exact_learning_success(const Robp& p, const FiniteDistinguishingProblem& prob, unsigned threads = 1);

/// Reach probability of every vertex of layer j under the planted branch
/// with seed x, or under D0 when x is absent.
std::vector<double> layer_reach(const Robp& p, std::size_t j, const FiniteDistinguishingProblem& prob,
                                std::optional<std::size_t> x);

/// P_j(v) and the posterior P_{x|v} of the seed given that the planted
/// computation reaches v. posterior is empty when v is unreachable.
struct ConditionalSeed {
  double reach = 0.0;
  std::optional<std::vector<double>> posterior;

  bool defined() const noexcept { return posterior.has_value(); }
};

ConditionalSeed conditional_seed_dist(const Robp& p, std::size_t j, std::size_t v,
                                      const FiniteDistinguishingProblem& prob);
/// Conditionals for every vertex of layer j in one pass.
std::vector<ConditionalSeed> layer_conditionals(const Robp& p, std::size_t j, const FiniteDistinguishingProblem& prob);

/// Exact reach numerators R[v][x] = Pr[reach v | x] * denominator^j.
std::vector<std::vector<BigInt>> layer_reach_exact(const Robp& p, std::size_t j,
                                                   const FiniteDistinguishingProblem& prob);

/// Outcome of checking max_x P_{x|v}(x) <= d * d_t / |X| at every reachable
/// vertex with P_j(v) >= 1 / (d * d_t), d being the program width. Decided
/// in exact arithmetic.
struct MinEntropyReport {
  std::size_t reachable = 0;
  std::size_t heavy = 0;
  std::size_t violations = 0;
  /// Largest max_x P_{x|v}(x) * |X| / (d * d_t) over heavy vertices.
  double worst_ratio = 0.0;
  /// Largest |sum_v P_{x|v}(x') P_j(v) - 1/|X}| over layers and x', in
  /// double precision.
  double total_probability_residual = 0.0;
};

MinEntropyReport check_min_entropy(const Robp& p, const FiniteDistinguishingProblem& prob, double d_t);

/// Width-2 program equivalent to OrthogonalTester with fixed vectors.
/// Layer t < m holds "all orthogonal so far" and "some sample failed"
/// within the current block; at a block boundary the second vertex is an
/// accepting leaf. Length is vectors.size() * per_iter.
Robp compile_orthogonal_tester(const std::vector<BitString>& vectors, std::size_t per_iter);

/// Random program: one start vertex, `width` vertices on each inner layer,
/// uniform edges, and leaf labels uniform in [0, label_count). With
/// early_leaves, each inner vertex is a leaf with probability 1/4.
Robp random_robp(std::uint64_t alphabet, std::size_t length, std::size_t width, Rng& rng,
                 std::int64_t label_count = 2, bool early_leaves = false);

}  // namespace streamdist
