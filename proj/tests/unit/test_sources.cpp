#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "streamdist/errors.hpp"
#include "streamdist/gf2.hpp"
#include "streamdist/sources.hpp"

using namespace streamdist;

namespace {

double five_sigma(double p, double n) { return 5 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(Sources, FamilyNamesRoundTrip) {
  for (Family f : {Family::subspace, Family::sparse_parity, Family::local_prg}) {
    EXPECT_EQ(parse_family(family_name(f)), f);
  }
  EXPECT_EQ(parse_family("sparse"), Family::sparse_parity);
  EXPECT_EQ(parse_family("local"), Family::local_prg);
  EXPECT_THROW(parse_family("gaussian"), std::invalid_argument);
}

TEST(Sources, SpecValidation) {
  EXPECT_THROW(SourceSpec::subspace(4, 5).validate(), std::invalid_argument);
  EXPECT_THROW(SourceSpec::sparse_parity(4, 4).validate(), std::invalid_argument);
  EXPECT_THROW(SourceSpec::sparse_parity(4, 0).validate(), std::invalid_argument);
  EXPECT_THROW(SourceSpec::local_prg(2, builtin_predicate("xor", 3)).validate(), std::invalid_argument);
  EXPECT_NO_THROW(SourceSpec::subspace(4, 0).validate());
  EXPECT_DOUBLE_EQ(SourceSpec::sparse_parity(16, 4).sparse_rate(), 0.25);
}

TEST(Sources, SubspaceSamplesLieInSpan) {
  Rng rng(1);
  const auto spec = SourceSpec::subspace(16, 4);
  const Instance inst = draw_instance(spec, rng, true);
  EchelonBasis basis(16);
  for (const auto& v : inst.basis()) basis.insert(v);
  std::vector<BitString> seen;
  for (int i = 0; i < 200; ++i) {
    const auto u = std::get<VectorSample>(next_sample(inst, rng)).u;
    EXPECT_TRUE(basis.contains(u));
    seen.push_back(u);
  }
  // 200 samples from a 4-dimensional space span all of it.
  EXPECT_EQ(rank(std::span<const BitString>(seen)), 4u);
  EXPECT_THROW(inst.seed_x(), std::logic_error);
}

TEST(Sources, NullSubspaceSamplesHaveFullRank) {
  Rng rng(2);
  const Instance inst = draw_instance(SourceSpec::subspace(16, 4), rng, false);
  std::vector<BitString> seen;
  for (int i = 0; i < 64; ++i) seen.push_back(std::get<VectorSample>(next_sample(inst, rng)).u);
  EXPECT_EQ(rank(std::span<const BitString>(seen)), 16u);
  EXPECT_THROW(inst.basis(), std::logic_error);
}

TEST(Sources, SparsePlantedLabelsAreParities) {
  Rng rng(3);
  const auto spec = SourceSpec::sparse_parity(20, 4);
  const Instance inst = draw_instance(spec, rng, true);
  std::size_t ones = 0;
  const int draws = 4000;
  for (int i = 0; i < draws; ++i) {
    const auto e = std::get<EquationSample>(next_sample(inst, rng));
    EXPECT_EQ(e.b, inner_product(e.a, inst.seed_x()));
    ones += e.a.popcount();
  }
  const double rate = static_cast<double>(ones) / (20.0 * draws);
  EXPECT_NEAR(rate, 0.2, five_sigma(0.2, 20.0 * draws));
}

TEST(Sources, NullLabelsAreUnbiased) {
  Rng rng(4);
  for (const auto& spec : {SourceSpec::sparse_parity(12, 3), SourceSpec::local_prg(12, builtin_predicate("and", 3))}) {
    const Instance inst = draw_instance(spec, rng, false);
    int ones = 0;
    const int draws = 8000;
    for (int i = 0; i < draws; ++i) {
      const Sample s = next_sample(inst, rng);
      ones += std::visit([](const auto& v) -> int {
        if constexpr (requires { v.b; }) return v.b ? 1 : 0;
        return 0;
      }, s);
    }
    EXPECT_NEAR(ones / static_cast<double>(draws), 0.5, five_sigma(0.5, draws));
  }
}

TEST(Sources, LocalPlantedLabelsEvaluatePredicate) {
  Rng rng(5);
  const auto p = builtin_predicate("tsa", 5);
  const Instance inst = draw_instance(SourceSpec::local_prg(12, p), rng, true);
  for (int i = 0; i < 500; ++i) {
    const auto s = std::get<LocalSample>(next_sample(inst, rng));
    EXPECT_EQ(s.b, p.evaluate(project(inst.seed_x(), s.a)));
  }
}

TEST(Sources, PlantedInstanceValidatesSeed) {
  const auto spec = SourceSpec::subspace(4, 2);
  std::vector<BitString> dependent = {BitString::from_string("1100"), BitString::from_string("1100")};
  EXPECT_THROW(planted_instance(spec, dependent), std::invalid_argument);
  EXPECT_THROW(planted_instance(SourceSpec::sparse_parity(4, 1), BitString(5)), DimensionError);
  EXPECT_FALSE(null_instance(spec).planted());
}

TEST(Sources, InstanceStreamHonoursLimit) {
  Rng rng(6);
  InstanceStream s(draw_instance(SourceSpec::subspace(8, 2), rng), 77, 5);
  int count = 0;
  while (s.next()) ++count;
  EXPECT_EQ(count, 5);
  EXPECT_EQ(s.consumed(), 5u);
}

TEST(Sources, InstanceStreamIsReproducible) {
  Rng rng(7);
  const Instance inst = draw_instance(SourceSpec::sparse_parity(10, 2), rng, true);
  InstanceStream a(inst, 42, 20), b(inst, 42, 20);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(*a.next(), *b.next());
}

TEST(Sources, HybridStreamSwitchesAtJ) {
  Rng rng(8);
  const auto p = builtin_predicate("xor", 2);
  const auto spec = SourceSpec::local_prg(10, p);
  const BitString x = uniform_bitstring(10, rng);
  // The first j samples are planted; with j = m every label is consistent.
  const auto all = hybrid_stream(x, 30, 30, spec, rng);
  ASSERT_EQ(all.size(), 30u);
  for (const auto& s : all) {
    const auto& l = std::get<LocalSample>(s);
    EXPECT_EQ(l.b, p.evaluate(project(x, l.a)));
  }
  // With j = 0 about half the labels disagree with the seed.
  int disagree = 0;
  const auto none = hybrid_stream(x, 0, 2000, spec, rng);
  for (const auto& s : none) {
    const auto& l = std::get<LocalSample>(s);
    disagree += l.b != p.evaluate(project(x, l.a));
  }
  EXPECT_NEAR(disagree / 2000.0, 0.5, five_sigma(0.5, 2000));
  EXPECT_THROW(hybrid_stream(x, 5, 4, spec, rng), std::invalid_argument);
}

TEST(Sources, SinglePassStreamRefusesRewind) {
  SinglePassStream s({VectorSample{BitString(3)}});
  EXPECT_TRUE(s.next().has_value());
  EXPECT_FALSE(s.next().has_value());
  EXPECT_THROW(s.rewind(), std::logic_error);
}

TEST(Sources, FormatParseRoundTrip) {
  Rng rng(9);
  for (const auto& spec : {SourceSpec::subspace(13, 3), SourceSpec::sparse_parity(13, 3),
                           SourceSpec::local_prg(13, builtin_predicate("maj", 3))}) {
    const Instance inst = draw_instance(spec, rng, true);
    for (int i = 0; i < 50; ++i) {
      const Sample s = next_sample(inst, rng);
      EXPECT_EQ(parse_sample(format_sample(s), spec), s);
    }
  }
  const auto local = SourceSpec::local_prg(5, builtin_predicate("xor", 2));
  const Sample s = LocalSample{OrderedTuple({4, 0}, 5), true};
  EXPECT_EQ(format_sample(s), "a=5,1 b=1");
  EXPECT_THROW(parse_sample("a=0,1 b=1", local), std::invalid_argument);
  EXPECT_THROW(parse_sample("a=1,2,3 b=1", local), DimensionError);
  EXPECT_THROW(parse_sample("a=1,2 b=2", local), std::invalid_argument);
}

TEST(Sources, AlphabetCodesAreInjectiveAndInRange) {
  const auto local = SourceSpec::local_prg(5, builtin_predicate("xor", 2));
  EXPECT_EQ(alphabet_size(local), 40u);
  std::set<std::uint64_t> codes;
  for (std::uint64_t r = 0; r < 20; ++r) {
    for (bool b : {false, true}) {
      const auto c = alphabet_code(LocalSample{tuple_unrank(r, 5, 2), b});
      EXPECT_LT(c, 40u);
      codes.insert(c);
    }
  }
  EXPECT_EQ(codes.size(), 40u);

  EXPECT_EQ(alphabet_size(SourceSpec::sparse_parity(6, 2)), 128u);
  EXPECT_EQ(alphabet_code(EquationSample{BitString::from_uint(5, 6), true}), 11u);
  EXPECT_EQ(alphabet_size(SourceSpec::subspace(6, 2)), 64u);
  EXPECT_EQ(alphabet_code(VectorSample{BitString::from_uint(37, 6)}), 37u);
}
