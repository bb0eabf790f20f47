#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "streamdist/bitstring.hpp"
#include "streamdist/predicate.hpp"
#include "streamdist/rng.hpp"
#include "streamdist/sources.hpp"

namespace streamdist {

/// Memory audit of one run.
///
/// data_bits is the high-water mark of retained data between feed calls:
/// stored samples at their encoded size, counters at their bit width.
/// declared_bound is the a priori bound for the configured parameters, and
/// program_bits is the state a fixed (non-uniform) branching program would
/// need, where anything fixed in advance counts as code.
struct MemoryReport {
  std::size_t data_bits = 0;
  std::size_t declared_bound = 0;
  std::size_t program_bits = 0;
};

/// Bits needed to hold any integer in [0, max_value].
std::size_t counter_bits(std::uint64_t max_value) noexcept;

/// Single-pass streaming tester. Samples are fed in order; decide() returns
/// 1 for "planted" and 0 for "null" and is cached after the first call.
class Distinguisher {
 public:
  virtual ~Distinguisher() = default;

  virtual std::string_view name() const = 0;

  /// Ignored once done(); throws std::logic_error after decide().
  void feed(const Sample& s);
  bool decide();

  /// No further samples can change the decision.
  virtual bool done() const = 0;
  /// Longest stream the tester may consume.
  virtual std::size_t samples_needed() const = 0;

  std::size_t fed() const noexcept { return fed_; }
  MemoryReport memory() const { return {high_water_, declared_bound(), program_bits()}; }

 protected:
  virtual void on_feed(const Sample& s) = 0;
  virtual bool on_decide() = 0;
  virtual std::size_t retained_bits() const = 0;
  virtual std::size_t declared_bound() const = 0;
  virtual std::size_t program_bits() const { return declared_bound(); }

 private:
  std::size_t fed_ = 0;
  std::size_t high_water_ = 0;
  std::optional<bool> decision_;
};

/// Feeds samples until the tester is done or the source runs dry, then decides.
bool run_distinguisher(Distinguisher& d, SampleSource& source);

/// Projects the first `window` samples onto the first min(window, n)
/// coordinates; outputs 1 iff their rank is at most k.
class SubspaceRankTester final : public Distinguisher {
 public:
  SubspaceRankTester(std::size_t k, std::size_t n, std::optional<std::size_t> window = std::nullopt);

  std::string_view name() const override { return "subspace_rank"; }
  bool done() const override { return stored_.size() >= window_; }
  std::size_t samples_needed() const override { return window_; }
  std::size_t window() const noexcept { return window_; }

 protected:
  void on_feed(const Sample& s) override;
  bool on_decide() override;
  std::size_t retained_bits() const override;
  std::size_t declared_bound() const override;

 private:
  std::size_t k_;
  std::size_t n_;
  std::size_t window_;
  std::size_t cols_;
  std::vector<BitString> stored_;
};

/// Repeats `iterations` times: pick a nonzero v, read the next per_iter
/// samples, and output 1 at once if all of them are orthogonal to v.
/// Outputs 0 after the last iteration. Blocks are always read in full.
class OrthogonalTester final : public Distinguisher {
 public:
  /// Draws each v uniformly from the nonzero vectors using `seed`.
  /// Defaults: iterations = 10 * 2^k, per_iter = 2k.
  OrthogonalTester(std::size_t k, std::size_t n, std::uint64_t seed, std::optional<std::size_t> iterations = {},
                   std::optional<std::size_t> per_iter = {});
  /// Uses vectors[i] in iteration i; iterations = vectors.size().
  OrthogonalTester(std::vector<BitString> vectors, std::size_t per_iter);

  std::string_view name() const override { return "orthogonal_tester"; }
  bool done() const override { return accepted_ || iteration_ >= iterations_; }
  std::size_t samples_needed() const override { return iterations_ * per_iter_; }

 protected:
  void on_feed(const Sample& s) override;
  bool on_decide() override;
  std::size_t retained_bits() const override;
  std::size_t declared_bound() const override;
  std::size_t program_bits() const override { return 1; }

 private:
  void start_iteration();

  std::size_t n_;
  std::size_t iterations_;
  std::size_t per_iter_;
  std::vector<BitString> fixed_;
  std::optional<Rng> rng_;
  std::optional<BitString> v_;
  std::size_t iteration_ = 0;
  std::size_t position_ = 0;
  bool all_orthogonal_ = true;
  bool accepted_ = false;
};

/// Stores `window` samples projected to the first n_eff coordinates and
/// outputs 1 iff their rank is at most r (1 = lower-dimensional).
class RankThreshold final : public Distinguisher {
 public:
  RankThreshold(std::size_t r, std::size_t window, std::size_t n_eff);

  std::string_view name() const override { return "rank_threshold"; }
  bool done() const override { return stored_.size() >= window_; }
  std::size_t samples_needed() const override { return window_; }

 protected:
  void on_feed(const Sample& s) override;
  bool on_decide() override;
  std::size_t retained_bits() const override;
  std::size_t declared_bound() const override;

 private:
  std::size_t r_;
  std::size_t window_;
  std::size_t n_eff_;
  std::vector<BitString> stored_;
};

/// Stores m0 equations (default 4n) and outputs 1 iff they have a common
/// solution.
class SparseSatTester final : public Distinguisher {
 public:
  explicit SparseSatTester(std::size_t n, std::optional<std::size_t> m0 = std::nullopt);

  std::string_view name() const override { return "sparse_sat"; }
  bool done() const override { return stored_.size() >= m0_; }
  std::size_t samples_needed() const override { return m0_; }

 protected:
  void on_feed(const Sample& s) override;
  bool on_decide() override;
  std::size_t retained_bits() const override;
  std::size_t declared_bound() const override;

 private:
  std::size_t n_;
  std::size_t m0_;
  std::vector<EquationSample> stored_;
};

/// Probability that a Ber(k/n) equation vector is exactly e_1.
double fixed_query_hit_probability(std::size_t n, std::size_t k);

/// Collects the labels of the first `quota` samples with a = e_1 and
/// outputs 1 iff they are all equal. If the quota is not met within
/// max_samples it outputs 1. Default max_samples = ceil(4 quota / p_hit).
class SparseFixedQuery final : public Distinguisher {
 public:
  SparseFixedQuery(std::size_t n, std::size_t k, std::size_t quota = 5,
                   std::optional<std::size_t> max_samples = std::nullopt);

  std::string_view name() const override { return "sparse_fixed_query"; }
  bool done() const override { return quota_reached() || fed() >= max_samples_; }
  std::size_t samples_needed() const override { return max_samples_; }
  bool quota_reached() const noexcept { return bits_.size() >= quota_; }

 protected:
  void on_feed(const Sample& s) override;
  bool on_decide() override;
  std::size_t retained_bits() const override;
  std::size_t declared_bound() const override;

 private:
  std::size_t n_;
  std::size_t quota_;
  std::size_t max_samples_;
  std::vector<bool> bits_;
};

/// Default stream cap for LocalPrefix: ceil(2 count / q), q being the
/// probability that a uniform tuple lies entirely inside the window.
std::size_t local_prefix_default_max_samples(std::size_t n, std::size_t k, std::size_t w, std::size_t count);

/// Keeps the first `count` samples whose indices all fall in the first w
/// seed positions, then outputs 1 iff some y in {0,1}^w labels all of them
/// correctly. Outputs 1 if fewer than `count` arrive within max_samples.
class LocalPrefix final : public Distinguisher {
 public:
  LocalPrefix(std::size_t n, Predicate p, std::size_t w, std::optional<std::size_t> count = std::nullopt,
              std::optional<std::size_t> max_samples = std::nullopt);

  std::string_view name() const override { return "local_prefix"; }
  bool done() const override { return stored_.size() >= count_ || fed() >= max_samples_; }
  std::size_t samples_needed() const override { return max_samples_; }
  std::size_t collected() const noexcept { return stored_.size(); }

 protected:
  void on_feed(const Sample& s) override;
  bool on_decide() override;
  std::size_t retained_bits() const override;
  std::size_t declared_bound() const override;

 private:
  std::size_t sample_bits() const;

  std::size_t n_;
  Predicate p_;
  std::size_t w_;
  std::size_t count_;
  std::size_t max_samples_;
  std::vector<LocalSample> stored_;
};

/// Ignores its input and outputs a fixed bit.
class ConstantDistinguisher final : public Distinguisher {
 public:
  explicit ConstantDistinguisher(bool value) : value_(value) {}
  std::string_view name() const override { return "constant"; }
  bool done() const override { return true; }
  std::size_t samples_needed() const override { return 0; }

 protected:
  void on_feed(const Sample&) override {}
  bool on_decide() override { return value_; }
  std::size_t retained_bits() const override { return 0; }
  std::size_t declared_bound() const override { return 0; }

 private:
  bool value_;
};

/// Ignores its input and outputs a fair coin.
class CoinFlipDistinguisher final : public Distinguisher {
 public:
  explicit CoinFlipDistinguisher(std::uint64_t seed) : rng_(seed) {}
  std::string_view name() const override { return "coin_flip"; }
  bool done() const override { return true; }
  std::size_t samples_needed() const override { return 0; }

 protected:
  void on_feed(const Sample&) override {}
  bool on_decide() override { return rng_.bit(); }
  std::size_t retained_bits() const override { return 0; }
  std::size_t declared_bound() const override { return 0; }

 private:
  Rng rng_;
};

using ParamMap = std::map<std::string, double>;
using DistinguisherFactory = std::function<std::unique_ptr<Distinguisher>(std::uint64_t seed)>;

/// Names accepted by make_distinguisher.
const std::vector<std::string>& distinguisher_names();

/// Builds a tester by name. n, k and the predicate default to the source
/// spec; entries in `params` override them. Throws std::invalid_argument
/// for an unknown name, a bad parameter, or a source the tester cannot read.
std::unique_ptr<Distinguisher> make_distinguisher(const std::string& name, const ParamMap& params,
                                                  const SourceSpec& spec, std::uint64_t seed);

DistinguisherFactory distinguisher_factory(const std::string& name, const ParamMap& params, const SourceSpec& spec);

}  // namespace streamdist
