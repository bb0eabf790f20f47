#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "streamdist/bitstring.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

/// <u, v> = sum_i u^i v^i mod 2.
bool inner_product(const BitString& u, const BitString& v);

/// Dense matrix over GF(2) stored as a list of packed rows.
class Gf2Matrix {
 public:
  /// All-zero matrix. Both dimensions must be positive.
  Gf2Matrix(std::size_t n_rows, std::size_t n_cols);
  /// Rows must be nonempty and share one length.
  explicit Gf2Matrix(std::vector<BitString> rows);

  static Gf2Matrix identity(std::size_t n);

  std::size_t n_rows() const noexcept { return rows_.size(); }
  std::size_t n_cols() const noexcept { return n_cols_; }
  const std::vector<BitString>& rows() const noexcept { return rows_; }
  const BitString& row(std::size_t r) const { return rows_.at(r); }

  bool get(std::size_t r, std::size_t c) const { return rows_.at(r).test(c); }
  void set(std::size_t r, std::size_t c, bool value) { rows_.at(r).set(c, value); }

  /// Matrix-vector product: component r is <row r, v>.
  BitString multiply(const BitString& v) const;

 private:
  std::vector<BitString> rows_;
  std::size_t n_cols_;
};

/// Incremental row-echelon basis keyed by pivot column. Each stored row's
/// lowest set bit is its pivot, and pivots are distinct. Reducing a vector
/// always uses the lowest-index nonzero column first.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t n_cols);

  /// Reduces v (and its augmented bit) against the basis. Returns true and
  /// stores the reduced row if v is independent of the current span.
  bool insert(BitString v, bool augmented = false);
  /// True if v lies in the span.
  bool contains(BitString v) const;

  std::size_t rank() const noexcept { return rank_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  /// Set once an inserted row reduced to 0 = 1.
  bool contradiction() const noexcept { return contradiction_; }

  /// A solution of every inserted equation with free variables set to 0.
  /// Requires !contradiction().
  BitString back_substitute() const;

 private:
  struct Row {
    BitString bits;
    bool rhs;
  };
  std::size_t n_cols_;
  std::size_t rank_ = 0;
  bool contradiction_ = false;
  std::vector<std::optional<Row>> by_pivot_;
};

/// GF(2) row rank by Gaussian elimination. The input is not modified.
std::size_t rank(const Gf2Matrix& m);
std::size_t rank(std::span<const BitString> rows);

struct SolveResult {
  bool consistent = false;
  std::optional<BitString> witness;
};

/// Decides whether m * x = rhs has a solution; when it does, the witness
/// has every free variable set to 0 (pivots on lowest-index columns).
SolveResult solve_consistent(const Gf2Matrix& m, const BitString& rhs);

/// Ordered k-tuple of distinct 0-based indices below n. The mathematical
/// index a^i in [1, n] is stored as a^i - 1.
class OrderedTuple {
 public:
  OrderedTuple(std::vector<std::uint32_t> indices, std::size_t n);

  std::size_t k() const noexcept { return indices_.size(); }
  std::size_t n() const noexcept { return n_; }
  std::uint32_t operator[](std::size_t i) const { return indices_.at(i); }
  const std::vector<std::uint32_t>& indices() const noexcept { return indices_; }

  friend bool operator==(const OrderedTuple&, const OrderedTuple&) = default;

 private:
  std::vector<std::uint32_t> indices_;
  std::size_t n_;
};

/// n (n-1) ... (n-k+1), the number of ordered k-tuples of distinct indices.
std::uint64_t falling_factorial(std::size_t n, std::size_t k);

/// Mixed-radix rank of a tuple in [0, falling_factorial(n, k)). Position i
/// contributes the index of a^i among the values not used at positions
/// 0..i-1, in radix n - i.
std::uint64_t tuple_rank(const OrderedTuple& a);
OrderedTuple tuple_unrank(std::uint64_t code, std::size_t n, std::size_t k);

/// Component i of the result is bit a^i of x.
BitString project(const BitString& x, const OrderedTuple& a);

BitString uniform_bitstring(std::size_t n, Rng& rng);

/// k linearly independent vectors whose span is uniform over all
/// k-dimensional subspaces of {0,1}^n. Each vector is redrawn until it is
/// independent of those before it.
std::vector<BitString> sample_subspace_basis(std::size_t n, std::size_t k, Rng& rng);

/// Uniform invertible n x n matrix by rejection of uniform matrices.
Gf2Matrix sample_full_rank_map(std::size_t n, Rng& rng);

/// n independent Bernoulli(p) bits.
BitString sample_sparse_vector(std::size_t n, double p, Rng& rng);

/// Uniform ordered k-tuple of distinct indices below n (partial Fisher-Yates).
OrderedTuple sample_ordered_tuple(std::size_t n, std::size_t k, Rng& rng);

}  // namespace streamdist
