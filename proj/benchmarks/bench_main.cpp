#include <benchmark/benchmark.h>

#include "streamdist/distinguishers.hpp"
#include "streamdist/gf2.hpp"
#include "streamdist/monte_carlo.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/robp.hpp"
#include "streamdist/spectral.hpp"

using namespace streamdist;

static void BM_Rank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<BitString> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(uniform_bitstring(n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(rank(std::span<const BitString>(rows)));
}
BENCHMARK(BM_Rank)->Arg(64)->Arg(256)->Arg(1024);

static void BM_WalshHadamard(benchmark::State& state) {
  const auto p = builtin_predicate("xor", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(walsh_hadamard(p));
}
BENCHMARK(BM_WalshHadamard)->Arg(5)->Arg(10)->Arg(16);

static void BM_Krawtchouk(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bias_set_size(n, 4, 0.5));
}
BENCHMARK(BM_Krawtchouk)->Arg(32)->Arg(64);

static void BM_ExactSuccess(benchmark::State& state) {
  const auto prob = FiniteDistinguishingProblem::local_prg(10, builtin_predicate("xor", 1));
  Rng rng(3);
  const Robp prog = random_robp(prob.alphabet, static_cast<std::size_t>(state.range(0)), 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exact_success(prog, prob));
}
BENCHMARK(BM_ExactSuccess)->Arg(2)->Arg(4);

static void BM_EstimateSuccess(benchmark::State& state) {
  const auto spec = SourceSpec::subspace(24, 4);
  const auto make = distinguisher_factory("subspace_rank", {}, spec);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_success(make, spec, std::nullopt, 200, 7));
}
BENCHMARK(BM_EstimateSuccess)->Unit(benchmark::kMillisecond);

static void BM_LocalPrefixEstimate(benchmark::State& state) {
  const auto spec = SourceSpec::local_prg(64, builtin_predicate("xor", 2));
  const auto make = distinguisher_factory("local_prefix", {{"w", 10}, {"count", 20}}, spec);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_success(make, spec, std::nullopt, 50, 9));
}
BENCHMARK(BM_LocalPrefixEstimate)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
