#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "streamdist/errors.hpp"
#include "streamdist/gf2.hpp"

using namespace streamdist;

namespace {

// Span size by enumerating every subset of the rows.
std::size_t span_size(const std::vector<BitString>& rows) {
  std::set<std::string> seen;
  const std::size_t n = rows.front().size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rows.size()); ++mask) {
    BitString v(n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if ((mask >> r) & 1U) v ^= rows[r];
    }
    seen.insert(v.to_string());
  }
  return seen.size();
}

bool brute_inner(const BitString& u, const BitString& v) {
  bool acc = false;
  for (std::size_t i = 0; i < u.size(); ++i) acc ^= u.test(i) && v.test(i);
  return acc;
}

}  // namespace

TEST(Gf2, InnerProductMatchesBitLoop) {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const auto u = uniform_bitstring(150, rng);
    const auto v = uniform_bitstring(150, rng);
    EXPECT_EQ(inner_product(u, v), brute_inner(u, v));
  }
  EXPECT_THROW(inner_product(BitString(3), BitString(4)), DimensionError);
}

TEST(Gf2, RankMatchesSpanEnumeration) {
  Rng rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng.uniform_below(9);
    const std::size_t rows = 1 + rng.uniform_below(8);
    std::vector<BitString> m;
    for (std::size_t r = 0; r < rows; ++r) {
      // Bias toward low-rank matrices so degenerate cases appear.
      m.push_back(rng.bernoulli(0.3) && r > 0 ? m[rng.uniform_below(r)] : uniform_bitstring(n, rng));
    }
    const std::size_t r = rank(Gf2Matrix(m));
    EXPECT_EQ(std::size_t{1} << r, span_size(m));
  }
}

TEST(Gf2, RankDoesNotModifyInput) {
  Rng rng(1);
  std::vector<BitString> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(uniform_bitstring(7, rng));
  const Gf2Matrix m(rows);
  (void)rank(m);
  EXPECT_EQ(m.rows(), rows);
}

TEST(Gf2, IdentityHasFullRank) {
  for (std::size_t n : {1, 5, 64, 65, 200}) EXPECT_EQ(rank(Gf2Matrix::identity(n)), n);
}

TEST(Gf2, SolveAgreesWithExhaustiveSearch) {
  Rng rng(9);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng.uniform_below(8);
    const std::size_t rows = 1 + rng.uniform_below(10);
    std::vector<BitString> m;
    for (std::size_t r = 0; r < rows; ++r) m.push_back(uniform_bitstring(n, rng));
    const Gf2Matrix mat(m);
    const BitString rhs = uniform_bitstring(rows, rng);
    bool exists = false;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n) && !exists; ++x) {
      exists = mat.multiply(BitString::from_uint(x, n)) == rhs;
    }
    const SolveResult res = solve_consistent(mat, rhs);
    ASSERT_EQ(res.consistent, exists);
    if (exists) {
      ASSERT_TRUE(res.witness.has_value());
      EXPECT_EQ(mat.multiply(*res.witness), rhs);
    } else {
      EXPECT_FALSE(res.witness.has_value());
    }
  }
}

TEST(Gf2, WitnessSetsFreeVariablesToZero) {
  // x0 + x2 = 1 leaves x1 and x2 free; pivots sit on the lowest column.
  const Gf2Matrix m(std::vector<BitString>{BitString::from_string("101")});
  const auto res = solve_consistent(m, BitString::from_string("1"));
  ASSERT_TRUE(res.consistent);
  EXPECT_EQ(res.witness->to_string(), "100");
}

TEST(Gf2, EchelonContainsMatchesSpan) {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    EchelonBasis basis(6);
    std::vector<BitString> rows;
    for (int i = 0; i < 3; ++i) {
      rows.push_back(uniform_bitstring(6, rng));
      basis.insert(rows.back());
    }
    const auto v = uniform_bitstring(6, rng);
    auto extended = rows;
    extended.push_back(v);
    EXPECT_EQ(basis.contains(v), span_size(extended) == span_size(rows));
  }
}

TEST(Gf2, TupleRankIsABijection) {
  for (std::size_t n : {1, 4, 6}) {
    for (std::size_t k = 1; k <= n && k <= 4; ++k) {
      const auto total = falling_factorial(n, k);
      std::set<std::vector<std::uint32_t>> seen;
      for (std::uint64_t c = 0; c < total; ++c) {
        const auto t = tuple_unrank(c, n, k);
        EXPECT_EQ(tuple_rank(t), c);
        seen.insert(t.indices());
      }
      EXPECT_EQ(seen.size(), total);
    }
  }
  EXPECT_EQ(falling_factorial(6, 3), 120u);
  EXPECT_EQ(falling_factorial(3, 4), 0u);
  EXPECT_THROW(tuple_unrank(120, 6, 3), std::out_of_range);
}

TEST(Gf2, TupleRankIsLexicographic) {
  // Mixed-radix digits make rank order equal lexicographic order of indices.
  std::vector<std::uint32_t> prev;
  for (std::uint64_t c = 0; c < falling_factorial(5, 3); ++c) {
    const auto t = tuple_unrank(c, 5, 3).indices();
    if (c > 0) {
      EXPECT_LT(prev, t);
    }
    prev = t;
  }
}

TEST(Gf2, OrderedTupleValidation) {
  EXPECT_THROW(OrderedTuple({1, 1}, 4), std::invalid_argument);
  EXPECT_THROW(OrderedTuple({4}, 4), std::out_of_range);
  EXPECT_THROW(OrderedTuple({}, 4), std::invalid_argument);
  EXPECT_THROW(OrderedTuple({0, 1, 2}, 2), std::domain_error);
}

TEST(Gf2, ProjectReadsTupleCoordinates) {
  const auto x = BitString::from_string("0110");
  EXPECT_EQ(project(x, OrderedTuple({2, 0, 1}, 4)).to_string(), "101");
}

TEST(Gf2, SampledSubspaceBasisIsIndependent) {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const auto basis = sample_subspace_basis(12, 5, rng);
    EXPECT_EQ(basis.size(), 5u);
    EXPECT_EQ(rank(std::span<const BitString>(basis)), 5u);
  }
  EXPECT_THROW(sample_subspace_basis(3, 4, rng), std::domain_error);
}

TEST(Gf2, FullRankMapIsInvertible) {
  Rng rng(8);
  for (std::size_t n : {1, 2, 7, 20}) EXPECT_EQ(rank(sample_full_rank_map(n, rng)), n);
}

TEST(Gf2, FullRankMapIsUniformOnSmallGroup) {
  // GL(2, 2) has 6 elements; each should appear with frequency 1/6.
  Rng rng(99);
  std::map<std::string, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const auto m = sample_full_rank_map(2, rng);
    counts[m.row(0).to_string() + m.row(1).to_string()]++;
  }
  EXPECT_EQ(counts.size(), 6u);
  const double sigma = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, draws / 6.0, 5 * sigma) << k;
}

TEST(Gf2, OrderedTupleSamplerIsUniform) {
  Rng rng(17);
  std::map<std::vector<std::uint32_t>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) counts[sample_ordered_tuple(4, 2, rng).indices()]++;
  EXPECT_EQ(counts.size(), 12u);
  const double p = 1.0 / 12;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, draws * p, 5 * sigma);
}

TEST(Gf2, SparseVectorRate) {
  Rng rng(2);
  std::size_t ones = 0;
  const std::size_t n = 100, reps = 2000;
  for (std::size_t r = 0; r < reps; ++r) ones += sample_sparse_vector(n, 0.1, rng).popcount();
  const double total = static_cast<double>(n * reps);
  EXPECT_NEAR(ones / total, 0.1, 5 * std::sqrt(0.09 / total));
  EXPECT_THROW(sample_sparse_vector(4, 1.5, rng), std::domain_error);
}
