#include <gtest/gtest.h>

#include <cmath>

#include "streamdist/distinguishers.hpp"
#include "streamdist/errors.hpp"
#include "streamdist/gf2.hpp"

using namespace streamdist;

namespace {

std::vector<Sample> draw(const Instance& inst, std::size_t count, Rng& rng) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(next_sample(inst, rng));
  return out;
}

bool run_on(Distinguisher& d, std::vector<Sample> samples) {
  SinglePassStream s(std::move(samples));
  return run_distinguisher(d, s);
}

// Consistency of a linear system by trying every assignment.
bool brute_satisfiable(const std::vector<Sample>& samples, std::size_t n) {
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const BitString xs = BitString::from_uint(x, n);
    bool ok = true;
    for (const auto& s : samples) {
      const auto& e = std::get<EquationSample>(s);
      if (inner_product(e.a, xs) != e.b) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST(Distinguisher, FeedAfterDecideThrows) {
  ConstantDistinguisher d(true);
  EXPECT_TRUE(d.decide());
  EXPECT_THROW(d.feed(VectorSample{BitString(2)}), std::logic_error);
}

TEST(Distinguisher, DecideIsCached) {
  CoinFlipDistinguisher d(5);
  const bool first = d.decide();
  for (int i = 0; i < 10; ++i) EXPECT_EQ(d.decide(), first);
}

TEST(Distinguisher, FeedIgnoredOnceDone) {
  SubspaceRankTester d(1, 4, 2);
  for (int i = 0; i < 5; ++i) d.feed(VectorSample{BitString::from_string("1000")});
  EXPECT_EQ(d.fed(), 2u);
  EXPECT_TRUE(d.decide());
}

TEST(Distinguisher, CounterBits) {
  EXPECT_EQ(counter_bits(0), 0u);
  EXPECT_EQ(counter_bits(1), 1u);
  EXPECT_EQ(counter_bits(8), 4u);
  EXPECT_EQ(counter_bits(255), 8u);
}

TEST(SubspaceRank, PlantedAlwaysOutputsOne) {
  Rng rng(1);
  const auto spec = SourceSpec::subspace(24, 4);
  for (int t = 0; t < 100; ++t) {
    SubspaceRankTester d(4, 24);
    EXPECT_TRUE(run_on(d, draw(draw_instance(spec, rng, true), 32, rng)));
  }
}

TEST(SubspaceRank, MatchesRankOfProjectedWindow) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t window = 1 + rng.uniform_below(10);
    const auto inst = draw_instance(SourceSpec::subspace(12, 3), rng);
    const auto samples = draw(inst, window, rng);
    std::vector<BitString> heads;
    const std::size_t cols = std::min<std::size_t>(window, 12);
    for (const auto& s : samples) {
      const auto& u = std::get<VectorSample>(s).u;
      BitString h(cols);
      for (std::size_t i = 0; i < cols; ++i) h.set(i, u.test(i));
      heads.push_back(h);
    }
    SubspaceRankTester d(3, 12, window);
    EXPECT_EQ(run_on(d, samples), rank(std::span<const BitString>(heads)) <= 3);
  }
}

TEST(SubspaceRank, ShortStreamThrows) {
  SubspaceRankTester d(2, 8);
  EXPECT_THROW(run_on(d, {VectorSample{BitString(8)}}), InsufficientSamples);
}

TEST(SubspaceRank, MemoryWithinDeclaredBound) {
  Rng rng(3);
  SubspaceRankTester d(4, 24);
  run_on(d, draw(draw_instance(SourceSpec::subspace(24, 4), rng), 32, rng));
  const auto m = d.memory();
  EXPECT_LE(m.data_bits, m.declared_bound);
  EXPECT_EQ(m.data_bits, 32u * 24u + counter_bits(32));
}

TEST(RankThreshold, OutputsOneOnLowRank) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = rng.uniform_below(6);
    const auto inst = draw_instance(SourceSpec::subspace(10, 5), rng);
    const auto samples = draw(inst, 12, rng);
    std::vector<BitString> rows;
    for (const auto& s : samples) rows.push_back(std::get<VectorSample>(s).u);
    RankThreshold d(r, 12, 10);
    EXPECT_EQ(run_on(d, samples), rank(std::span<const BitString>(rows)) <= r);
  }
}

TEST(OrthogonalTester, FixedScheduleMatchesBlockOracle) {
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    std::vector<BitString> vs;
    for (int i = 0; i < 3; ++i) {
      BitString v = uniform_bitstring(5, rng);
      if (v.none()) v.set(0);
      vs.push_back(v);
    }
    const std::size_t per_iter = 1 + rng.uniform_below(3);
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < 3 * per_iter; ++i) samples.push_back(VectorSample{uniform_bitstring(5, rng)});
    bool expected = false;
    for (std::size_t b = 0; b < 3 && !expected; ++b) {
      bool all = true;
      for (std::size_t j = 0; j < per_iter; ++j) {
        all = all && !inner_product(std::get<VectorSample>(samples[b * per_iter + j]).u, vs[b]);
      }
      expected = all;
    }
    OrthogonalTester d(vs, per_iter);
    EXPECT_EQ(run_on(d, samples), expected);
  }
}

TEST(OrthogonalTester, ProgramBitsIsOne) {
  OrthogonalTester d(3, 8, 1);
  EXPECT_EQ(d.memory().program_bits, 1u);
  EXPECT_EQ(d.samples_needed(), 10u * 8u * 6u);
}

TEST(SparseSat, AgreesWithExhaustiveSearch) {
  Rng rng(6);
  const auto spec = SourceSpec::sparse_parity(8, 3);
  for (int t = 0; t < 200; ++t) {
    const auto inst = draw_instance(spec, rng);
    const auto samples = draw(inst, 12, rng);
    SparseSatTester d(8, 12);
    EXPECT_EQ(run_on(d, samples), brute_satisfiable(samples, 8));
  }
}

TEST(SparseSat, PlantedAlwaysSatisfiable) {
  Rng rng(7);
  const auto spec = SourceSpec::sparse_parity(16, 4);
  for (int t = 0; t < 100; ++t) {
    SparseSatTester d(16);
    EXPECT_TRUE(run_on(d, draw(draw_instance(spec, rng, true), 64, rng)));
  }
}

TEST(SparseFixedQuery, OnlyCountsFirstUnitVector) {
  SparseFixedQuery d(4, 1, 2, 100);
  d.feed(EquationSample{BitString::from_string("1100"), true});   // weight 2: ignored
  d.feed(EquationSample{BitString::from_string("0100"), true});   // wrong coordinate
  d.feed(EquationSample{BitString::from_string("1000"), true});
  EXPECT_FALSE(d.quota_reached());
  d.feed(EquationSample{BitString::from_string("1000"), false});
  EXPECT_TRUE(d.quota_reached());
  EXPECT_FALSE(d.decide());
}

TEST(SparseFixedQuery, HitProbability) {
  EXPECT_DOUBLE_EQ(fixed_query_hit_probability(16, 2), 0.125 * std::pow(0.875, 15));
  SparseFixedQuery d(16, 2);
  EXPECT_EQ(d.samples_needed(),
            static_cast<std::size_t>(std::ceil(20.0 / fixed_query_hit_probability(16, 2))));
}

TEST(LocalPrefix, AgreesWithBruteConsistency) {
  Rng rng(8);
  const auto p = builtin_predicate("and", 2);
  const auto spec = SourceSpec::local_prg(8, p);
  for (int t = 0; t < 200; ++t) {
    const auto inst = draw_instance(spec, rng);
    std::vector<Sample> samples;
    std::vector<LocalSample> kept;
    while (kept.size() < 6) {
      const Sample s = next_sample(inst, rng);
      samples.push_back(s);
      const auto& l = std::get<LocalSample>(s);
      if (l.a[0] < 4 && l.a[1] < 4) kept.push_back(l);
    }
    bool expected = false;
    for (std::uint64_t y = 0; y < 16 && !expected; ++y) {
      bool ok = true;
      for (const auto& l : kept) ok = ok && p.evaluate(project(BitString::from_uint(y, 8), l.a)) == l.b;
      expected = ok;
    }
    LocalPrefix d(8, p, 4, 6, 100000);
    EXPECT_EQ(run_on(d, samples), expected);
  }
}

TEST(LocalPrefix, TimeoutDecidesOne) {
  LocalPrefix d(8, builtin_predicate("xor", 2), 4, 6, 3);
  run_on(d, {LocalSample{OrderedTuple({6, 7}, 8), true}, LocalSample{OrderedTuple({6, 7}, 8), true},
             LocalSample{OrderedTuple({6, 7}, 8), true}});
  EXPECT_EQ(d.collected(), 0u);
  EXPECT_TRUE(d.decide());
}

TEST(Factory, RejectsUnknownNamesAndParams) {
  const auto sub = SourceSpec::subspace(8, 2);
  EXPECT_THROW(make_distinguisher("nope", {}, sub, 0), std::invalid_argument);
  EXPECT_THROW(make_distinguisher("subspace_rank", {{"bogus", 1}}, sub, 0), std::invalid_argument);
  EXPECT_THROW(make_distinguisher("subspace_rank", {{"window", 2.5}}, sub, 0), std::invalid_argument);
  EXPECT_THROW(make_distinguisher("sparse_sat", {}, sub, 0), std::invalid_argument);
  EXPECT_THROW(make_distinguisher("local_prefix", {}, SourceSpec::local_prg(8, builtin_predicate("xor", 2)), 0),
               std::invalid_argument);
  EXPECT_THROW(distinguisher_factory("rank_threshold", {{"window", 0}}, sub), std::invalid_argument);
}

TEST(Factory, BuildsEveryNamedDistinguisher) {
  const auto local = SourceSpec::local_prg(8, builtin_predicate("xor", 2));
  for (const auto& name : distinguisher_names()) {
    SourceSpec spec = SourceSpec::subspace(8, 2);
    ParamMap params;
    if (name.rfind("sparse", 0) == 0) spec = SourceSpec::sparse_parity(8, 2);
    if (name == "local_prefix") {
      spec = local;
      params["w"] = 4;
    }
    const auto d = make_distinguisher(name, params, spec, 1);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->name(), name);
  }
}
