#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "streamdist/errors.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/rng.hpp"

using namespace streamdist;

namespace {

// Direct O(4^k) character sum.
std::int64_t brute_coefficient(const Predicate& p, std::uint32_t alpha) {
  std::int64_t acc = 0;
  for (std::uint32_t x = 0; x < p.truth_table().size(); ++x) {
    const bool sign = p.at(x) ^ ((std::popcount(alpha & x) & 1) != 0);
    acc += sign ? -1 : 1;
  }
  return acc;
}

Predicate random_predicate(std::size_t k, Rng& rng) {
  std::vector<std::uint8_t> t(std::size_t{1} << k);
  for (auto& v : t) v = rng.bit();
  return Predicate(k, t);
}

Predicate parse(const std::string& text) {
  std::istringstream in(text);
  return parse_predicate(in);
}

}  // namespace

TEST(Predicate, TruthTableIndexIsMsbFirst) {
  EXPECT_EQ(truth_table_index(BitString::from_string("100")), 4u);
  EXPECT_EQ(truth_table_index(BitString::from_string("001")), 1u);
  const auto tsa = builtin_predicate("tsa", 5);
  // x1 ^ x2 ^ x3 ^ (x4 & x5) with x4 = x5 = 1 and the rest 0.
  EXPECT_TRUE(tsa.evaluate(BitString::from_string("00011")));
  EXPECT_FALSE(tsa.evaluate(BitString::from_string("00010")));
  EXPECT_TRUE(tsa.evaluate(BitString::from_string("10000")));
}

TEST(Predicate, WalshHadamardMatchesCharacterSum) {
  Rng rng(12);
  for (std::size_t k = 1; k <= 7; ++k) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto p = random_predicate(k, rng);
      const auto s = walsh_hadamard(p);
      for (std::uint32_t a = 0; a < s.numerators.size(); ++a) EXPECT_EQ(s.numerators[a], brute_coefficient(p, a));
    }
  }
}

TEST(Predicate, ParsevalHolds) {
  Rng rng(13);
  for (std::size_t k = 1; k <= 10; ++k) {
    const auto s = walsh_hadamard(random_predicate(k, rng));
    double sum = 0;
    for (std::uint32_t a = 0; a < s.numerators.size(); ++a) sum += s.coefficient(a) * s.coefficient(a);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Predicate, InverseTransformRoundTrips) {
  Rng rng(14);
  for (std::size_t k = 1; k <= 9; ++k) {
    const auto p = random_predicate(k, rng);
    EXPECT_EQ(inverse_walsh_hadamard(walsh_hadamard(p)), p);
  }
  Spectrum bogus{2, {1, 1, 1, 0}};
  EXPECT_THROW(inverse_walsh_hadamard(bogus), std::invalid_argument);
}

TEST(Predicate, ResilienceOfBuiltins) {
  for (std::size_t k = 1; k <= 8; ++k) EXPECT_EQ(resilience(builtin_predicate("xor", k)), k);
  EXPECT_EQ(resilience(builtin_predicate("and", 2)), 0u);
  EXPECT_EQ(resilience(builtin_predicate("maj", 3)), 1u);
  EXPECT_EQ(resilience(builtin_predicate("tsa", 5)), 3u);
  EXPECT_EQ(resilience(builtin_predicate("const1", 3)), 0u);
}

TEST(Predicate, ResilienceMatchesBruteLevel) {
  Rng rng(15);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t k = 1 + rng.uniform_below(6);
    const auto p = random_predicate(k, rng);
    std::size_t expected = k + 1;
    for (std::uint32_t a = 0; a < (1U << k); ++a) {
      if (brute_coefficient(p, a) != 0) expected = std::min<std::size_t>(expected, std::popcount(a));
    }
    EXPECT_EQ(resilience(p), expected);
  }
}

TEST(Predicate, XorSpectrumIsSinglePoint) {
  const auto s = walsh_hadamard(builtin_predicate("xor", 4));
  for (std::uint32_t a = 0; a < 16; ++a) EXPECT_EQ(s.numerators[a], a == 15 ? 16 : 0);
  EXPECT_DOUBLE_EQ(s.coefficient(15), 1.0);
}

TEST(Predicate, BalancedFlag) {
  EXPECT_TRUE(builtin_predicate("xor", 3).balanced());
  EXPECT_TRUE(builtin_predicate("maj", 5).balanced());
  EXPECT_FALSE(builtin_predicate("and", 2).balanced());
}

TEST(Predicate, BuiltinErrors) {
  EXPECT_THROW(builtin_predicate("maj", 4), std::invalid_argument);
  EXPECT_THROW(builtin_predicate("tsa", 4), std::invalid_argument);
  EXPECT_THROW(builtin_predicate("nosuch", 3), std::invalid_argument);
}

TEST(Predicate, ConstructorValidates) {
  EXPECT_THROW(Predicate(2, {0, 1, 1}), std::exception);
  EXPECT_THROW(Predicate(0, {0}), std::exception);
  EXPECT_THROW(Predicate(kMaxArity + 1, {}), std::exception);
}

TEST(PredicateFile, ParsesTableLine) {
  const auto p = parse("2\n0110\n");
  EXPECT_EQ(p, builtin_predicate("xor", 2));
  EXPECT_EQ(p.table_string(), "0110");
  EXPECT_EQ(parse("  3 \n00000001\n\n"), builtin_predicate("and", 3));
}

TEST(PredicateFile, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of(""), 1u);
  EXPECT_EQ(line_of("x\n0110\n"), 1u);
  EXPECT_EQ(line_of("21\n"), 1u);
  EXPECT_EQ(line_of("2\n"), 2u);
  EXPECT_EQ(line_of("2\n011\n"), 2u);
  EXPECT_EQ(line_of("2\n01a0\n"), 2u);
  EXPECT_EQ(line_of("2\n0110\n\nextra\n"), 4u);
}

TEST(PredicateFile, LoadMissingFileThrows) {
  EXPECT_THROW(load_predicate("/nonexistent/predicate.txt"), std::exception);
}
