#include "streamdist/gf2.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

#include "streamdist/errors.hpp"

namespace streamdist {

bool inner_product(const BitString& u, const BitString& v) {
  if (u.size() != v.size()) throw DimensionError("inner_product: length mismatch");
  std::uint64_t acc = 0;
  const auto uw = u.words();
  const auto vw = v.words();
  for (std::size_t w = 0; w < uw.size(); ++w) acc ^= uw[w] & vw[w];
  return (std::popcount(acc) & 1) != 0;
}

Gf2Matrix::Gf2Matrix(std::size_t n_rows, std::size_t n_cols) : n_cols_(n_cols) {
  if (n_rows == 0 || n_cols == 0) throw DimensionError("Gf2Matrix: dimensions must be positive");
  rows_.assign(n_rows, BitString(n_cols));
}

Gf2Matrix::Gf2Matrix(std::vector<BitString> rows) : rows_(std::move(rows)), n_cols_(0) {
  if (rows_.empty()) throw DimensionError("Gf2Matrix: at least one row required");
  n_cols_ = rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != n_cols_) throw DimensionError("Gf2Matrix: rows differ in length");
  }
}

Gf2Matrix Gf2Matrix::identity(std::size_t n) {
  Gf2Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitString Gf2Matrix::multiply(const BitString& v) const {
  if (v.size() != n_cols_) throw DimensionError("Gf2Matrix::multiply: length mismatch");
  BitString out(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (inner_product(rows_[r], v)) out.set(r);
  }
  return out;
}

EchelonBasis::EchelonBasis(std::size_t n_cols) : n_cols_(n_cols), by_pivot_(n_cols) {}

bool EchelonBasis::insert(BitString v, bool augmented) {
  if (v.size() != n_cols_) throw DimensionError("EchelonBasis::insert: length mismatch");
  for (std::size_t p = v.find_first(); p < n_cols_; p = v.find_first()) {
    auto& slot = by_pivot_[p];
    if (!slot) {
      slot = Row{std::move(v), augmented};
      ++rank_;
      return true;
    }
    v ^= slot->bits;
    augmented ^= slot->rhs;
  }
  if (augmented) contradiction_ = true;
  return false;
}

bool EchelonBasis::contains(BitString v) const {
  if (v.size() != n_cols_) throw DimensionError("EchelonBasis::contains: length mismatch");
  for (std::size_t p = v.find_first(); p < n_cols_; p = v.find_first()) {
    if (!by_pivot_[p]) return false;
    v ^= by_pivot_[p]->bits;
  }
  return true;
}

BitString EchelonBasis::back_substitute() const {
  if (contradiction_) throw std::logic_error("EchelonBasis::back_substitute: system is inconsistent");
  BitString x(n_cols_);
  // Each row's other bits lie above its pivot, so resolve pivots top-down.
  for (std::size_t p = n_cols_; p-- > 0;) {
    const auto& row = by_pivot_[p];
    if (!row) continue;
    const bool value = row->rhs ^ inner_product(row->bits, x);
    // x.test(p) is still 0 here, so the pivot bit did not contribute.
    x.set(p, value);
  }
  return x;
}

std::size_t rank(std::span<const BitString> rows) {
  if (rows.empty()) return 0;
  EchelonBasis basis(rows.front().size());
  for (const auto& r : rows) {
    basis.insert(r);
    if (basis.rank() == basis.n_cols()) break;
  }
  return basis.rank();
}

std::size_t rank(const Gf2Matrix& m) { return rank(std::span<const BitString>(m.rows())); }

SolveResult solve_consistent(const Gf2Matrix& m, const BitString& rhs) {
  if (rhs.size() != m.n_rows()) throw DimensionError("solve_consistent: rhs length != row count");
  EchelonBasis basis(m.n_cols());
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    basis.insert(m.row(r), rhs.test(r));
    if (basis.contradiction()) return SolveResult{false, std::nullopt};
  }
  return SolveResult{true, basis.back_substitute()};
}

OrderedTuple::OrderedTuple(std::vector<std::uint32_t> indices, std::size_t n)
    : indices_(std::move(indices)), n_(n) {
  if (indices_.empty()) throw std::invalid_argument("OrderedTuple: k must be at least 1");
  if (indices_.size() > n_) throw std::domain_error("OrderedTuple: k exceeds n");
  std::vector<bool> seen(n_, false);
  for (auto i : indices_) {
    if (i >= n_) throw std::out_of_range("OrderedTuple: index out of range");
    if (seen[i]) throw std::invalid_argument("OrderedTuple: repeated index");
    seen[i] = true;
  }
}

std::uint64_t falling_factorial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < k; ++i) out *= static_cast<std::uint64_t>(n - i);
  return out;
}

std::uint64_t tuple_rank(const OrderedTuple& a) {
  const std::size_t n = a.n();
  std::vector<bool> used(n, false);
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < a.k(); ++i) {
    std::uint64_t digit = 0;
    for (std::uint32_t v = 0; v < a[i]; ++v) {
      if (!used[v]) ++digit;
    }
    used[a[i]] = true;
    code = code * (n - i) + digit;
  }
  return code;
}

OrderedTuple tuple_unrank(std::uint64_t code, std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw std::domain_error("tuple_unrank: need 1 <= k <= n");
  if (code >= falling_factorial(n, k)) throw std::out_of_range("tuple_unrank: code out of range");
  std::vector<std::uint64_t> digits(k);
  for (std::size_t i = k; i-- > 0;) {
    const std::uint64_t radix = n - i;
    digits[i] = code % radix;
    code /= radix;
  }
  std::vector<bool> used(n, false);
  std::vector<std::uint32_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uint64_t remaining = digits[i];
    for (std::uint32_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      if (remaining == 0) {
        idx[i] = v;
        used[v] = true;
        break;
      }
      --remaining;
    }
  }
  return OrderedTuple(std::move(idx), n);
}

BitString project(const BitString& x, const OrderedTuple& a) {
  BitString out(a.k());
  for (std::size_t i = 0; i < a.k(); ++i) {
    if (a[i] >= x.size()) throw std::out_of_range("project: tuple index beyond x");
    if (x.test(a[i])) out.set(i);
  }
  return out;
}

BitString uniform_bitstring(std::size_t n, Rng& rng) {
  BitString out(n);
  auto words = out.words();
  for (auto& w : words) w = rng();
  if (const std::size_t tail = n % 64; tail != 0) words.back() &= (std::uint64_t{1} << tail) - 1;
  return out;
}

std::vector<BitString> sample_subspace_basis(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::domain_error("sample_subspace_basis: k exceeds n");
  std::vector<BitString> basis;
  basis.reserve(k);
  EchelonBasis echelon(n);
  while (basis.size() < k) {
    BitString v = uniform_bitstring(n, rng);
    if (echelon.insert(v)) basis.push_back(std::move(v));
  }
  return basis;
}

Gf2Matrix sample_full_rank_map(std::size_t n, Rng& rng) {
  if (n == 0) throw std::domain_error("sample_full_rank_map: n must be at least 1");
  for (;;) {
    std::vector<BitString> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) rows.push_back(uniform_bitstring(n, rng));
    Gf2Matrix m(std::move(rows));
    if (rank(m) == n) return m;
  }
}

BitString sample_sparse_vector(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("sample_sparse_vector: p outside [0, 1]");
  BitString out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(p)) out.set(i);
  }
  return out;
}

OrderedTuple sample_ordered_tuple(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 0 || k > n) throw std::domain_error("sample_ordered_tuple: need 1 <= k <= n");
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0U);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return OrderedTuple(std::move(pool), n);
}

}  // namespace streamdist
