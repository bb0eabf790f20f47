#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "streamdist/bitstring.hpp"
#include "streamdist/gf2.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

enum class Family { subspace, sparse_parity, local_prg };

std::string_view family_name(Family f) noexcept;
Family parse_family(std::string_view name);

/// A distinguishing problem: dimension n plus the family parameter.
///   subspace:      k = subspace dimension, 0 <= k <= n
///   sparse_parity: k = expected equation weight, 0 < k < n
///   local_prg:     predicate of arity k, 1 <= k <= n
struct SourceSpec {
  Family family = Family::subspace;
  std::size_t n = 0;
  std::size_t k = 0;
  std::optional<Predicate> predicate;

  static SourceSpec subspace(std::size_t n, std::size_t k);
  static SourceSpec sparse_parity(std::size_t n, std::size_t k);
  static SourceSpec local_prg(std::size_t n, Predicate p);

  /// Throws std::invalid_argument on an out-of-range parameter.
  void validate() const;
  /// Bernoulli rate of each sparse equation coefficient, k / n.
  double sparse_rate() const { return static_cast<double>(k) / static_cast<double>(n); }
};

struct VectorSample {
  BitString u;
  friend bool operator==(const VectorSample&, const VectorSample&) = default;
};

struct EquationSample {
  BitString a;
  bool b = false;
  friend bool operator==(const EquationSample&, const EquationSample&) = default;
};

struct LocalSample {
  OrderedTuple a;
  bool b = false;
  friend bool operator==(const LocalSample&, const LocalSample&) = default;
};

using Sample = std::variant<VectorSample, EquationSample, LocalSample>;

/// Hidden seed: a subspace basis or a vector x. Absent on the null side.
using HiddenSeed = std::variant<std::monostate, std::vector<BitString>, BitString>;

struct Instance {
  SourceSpec spec;
  bool truth_bit = false;
  HiddenSeed hidden;

  bool planted() const noexcept { return truth_bit; }
  /// The seed x; throws std::logic_error for subspace or null instances.
  const BitString& seed_x() const;
  /// The planted basis; throws std::logic_error otherwise.
  const std::vector<BitString>& basis() const;
};

/// Draws b uniformly (or uses forced_bit) and a uniform hidden seed when b = 1.
Instance draw_instance(const SourceSpec& spec, Rng& rng, std::optional<bool> forced_bit = std::nullopt);

/// Instance with a caller-chosen seed. For subspace, `hidden` must be a
/// list of linearly independent vectors.
Instance planted_instance(const SourceSpec& spec, HiddenSeed hidden);
Instance null_instance(const SourceSpec& spec);

/// One iid sample from the instance's distribution. The query part (u, a)
/// is drawn the same way on both sides; only the label depends on b.
Sample next_sample(const Instance& inst, Rng& rng);

/// Pull-based sample stream.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  /// Next sample, or nullopt once the stream is exhausted.
  virtual std::optional<Sample> next() = 0;
  std::size_t consumed() const noexcept { return consumed_; }

 protected:
  std::size_t consumed_ = 0;
};

/// Lazily generated samples from an instance, optionally capped at `limit`.
class InstanceStream final : public SampleSource {
 public:
  InstanceStream(Instance inst, std::uint64_t seed, std::optional<std::size_t> limit = std::nullopt);
  std::optional<Sample> next() override;
  const Instance& instance() const noexcept { return inst_; }

 private:
  Instance inst_;
  Rng rng_;
  std::optional<std::size_t> limit_;
};

/// Hybrid H_j of length m: samples 1..j planted with seed x, j+1..m null.
class HybridStream final : public SampleSource {
 public:
  HybridStream(const SourceSpec& spec, BitString x, std::size_t j, std::size_t m, std::uint64_t seed);
  std::optional<Sample> next() override;

 private:
  Instance planted_;
  Instance null_;
  std::size_t j_;
  std::size_t m_;
  Rng rng_;
};

std::vector<Sample> hybrid_stream(const BitString& x, std::size_t j, std::size_t m, const SourceSpec& spec, Rng& rng);

/// Replays a fixed list of samples exactly once. Any attempt to rewind
/// throws std::logic_error, so tests can enforce single-pass consumers.
class SinglePassStream final : public SampleSource {
 public:
  explicit SinglePassStream(std::vector<Sample> samples);
  std::optional<Sample> next() override;
  [[noreturn]] void rewind();

 private:
  std::vector<Sample> samples_;
};

/// Dump format, one sample per line:
///   subspace "u=<hex>", sparse "a=<hex> b=<bit>", local "a=<i1,...,ik> b=<bit>"
/// Hex digits follow BitString::to_hex; tuple indices are 1-based.
std::string format_sample(const Sample& s);
Sample parse_sample(std::string_view line, const SourceSpec& spec);

/// Integer code of a sample used as a branching-program edge label.
///   subspace: the n-bit value of u (bit i of u is bit i of the code)
///   sparse:   2 * value(a) + b
///   local:    2 * tuple_rank(a) + b
std::uint64_t alphabet_code(const Sample& s);
/// Number of distinct codes for a spec; requires it to fit in 64 bits.
std::uint64_t alphabet_size(const SourceSpec& spec);

}  // namespace streamdist
