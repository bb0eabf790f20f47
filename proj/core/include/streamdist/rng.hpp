#pragma once

#include <bit>
#include <cstdint>
#include <limits>

namespace streamdist {

__extension__ typedef unsigned __int128 uint128_t;

/// SplitMix64 output mix. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed of child stream `index` of `master`:
///
///   derive_seed(m, i) = mix(mix(m) + gamma * (i + 1))
///
/// with mix = splitmix64_mix and gamma = 0x9E3779B97F4A7C15. For a fixed
/// master the map i -> seed is injective, so per-trial streams never
/// collide and do not depend on the order in which trials run.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64_mix(splitmix64_mix(master) + kGoldenGamma * (index + 1));
}

/// xoshiro256** seeded by expanding a 64-bit seed through SplitMix64.
///
/// Satisfies UniformRandomBitGenerator, but callers inside the library use
/// the member helpers below rather than <random> distributions, whose
/// output is implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += kGoldenGamma;
      word = splitmix64_mix(s);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept {
    // Lemire's nearly-divisionless rejection.
    uint128_t product = static_cast<uint128_t>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<uint128_t>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bit() noexcept { return ((*this)() >> 63) != 0; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// True with probability p; exact at p = 0 and p = 1.
  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Independent generator for child stream `index`, keyed on this
  /// generator's construction seed (not its current position).
  Rng child(std::uint64_t index) const noexcept { return Rng(derive_seed(seed_, index)); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4]{};
};

}  // namespace streamdist
