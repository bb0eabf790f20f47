#include "streamdist/distinguishers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include "streamdist/errors.hpp"
#include "streamdist/gf2.hpp"

namespace streamdist {

namespace {

template <class T>
const T& expect(const Sample& s, std::string_view who) {
  if (const auto* p = std::get_if<T>(&s)) return *p;
  throw std::invalid_argument(std::string(who) + ": sample type does not match this tester");
}

std::size_t ceil_log2(std::size_t x) {
  return x <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(x - 1));
}

}  // namespace

std::size_t counter_bits(std::uint64_t max_value) noexcept {
  return max_value == 0 ? 0 : static_cast<std::size_t>(std::bit_width(max_value));
}

void Distinguisher::feed(const Sample& s) {
  if (decision_) throw std::logic_error("feed after decide");
  if (done()) return;
  on_feed(s);
  ++fed_;
  high_water_ = std::max(high_water_, retained_bits());
}

bool Distinguisher::decide() {
  if (!decision_) decision_ = on_decide();
  return *decision_;
}

bool run_distinguisher(Distinguisher& d, SampleSource& source) {
  while (!d.done()) {
    auto s = source.next();
    if (!s) break;
    d.feed(*s);
  }
  return d.decide();
}

// ---- SubspaceRankTester ----

SubspaceRankTester::SubspaceRankTester(std::size_t k, std::size_t n, std::optional<std::size_t> window)
    : k_(k), n_(n), window_(window.value_or(8 * k)), cols_(0) {
  if (k < 1 || k >= n) throw std::invalid_argument("subspace_rank: need 1 <= k <= n - 1");
  if (window_ == 0) throw std::invalid_argument("subspace_rank: window must be positive");
  cols_ = std::min(window_, n_);
  stored_.reserve(window_);
}

void SubspaceRankTester::on_feed(const Sample& s) {
  const auto& v = expect<VectorSample>(s, name());
  if (v.u.size() != n_) throw DimensionError("subspace_rank: sample length != n");
  BitString head(cols_);
  for (std::size_t i = 0; i < cols_; ++i) head.set(i, v.u.test(i));
  stored_.push_back(std::move(head));
}

bool SubspaceRankTester::on_decide() {
  if (stored_.size() < window_) throw InsufficientSamples("subspace_rank: stream shorter than window");
  return rank(std::span<const BitString>(stored_)) <= k_;
}

std::size_t SubspaceRankTester::retained_bits() const {
  return stored_.size() * cols_ + counter_bits(window_);
}

std::size_t SubspaceRankTester::declared_bound() const { return window_ * cols_ + counter_bits(window_); }

// ---- OrthogonalTester ----

OrthogonalTester::OrthogonalTester(std::size_t k, std::size_t n, std::uint64_t seed,
                                   std::optional<std::size_t> iterations, std::optional<std::size_t> per_iter)
    : n_(n), iterations_(0), per_iter_(per_iter.value_or(2 * k)), rng_(Rng(seed)) {
  if (k < 1 || k > n) throw std::invalid_argument("orthogonal_tester: need 1 <= k <= n");
  if (!iterations && k >= 60) throw std::invalid_argument("orthogonal_tester: default iteration count overflows");
  iterations_ = iterations.value_or(10 * (std::size_t{1} << k));
  if (iterations_ == 0 || per_iter_ == 0) throw std::invalid_argument("orthogonal_tester: empty schedule");
}

OrthogonalTester::OrthogonalTester(std::vector<BitString> vectors, std::size_t per_iter)
    : n_(0), iterations_(vectors.size()), per_iter_(per_iter), fixed_(std::move(vectors)) {
  if (fixed_.empty() || per_iter_ == 0) throw std::invalid_argument("orthogonal_tester: empty schedule");
  n_ = fixed_.front().size();
  for (const auto& v : fixed_) {
    if (v.size() != n_) throw DimensionError("orthogonal_tester: vectors differ in length");
    if (v.none()) throw std::invalid_argument("orthogonal_tester: zero test vector");
  }
}

void OrthogonalTester::start_iteration() {
  if (!fixed_.empty()) {
    v_ = fixed_[iteration_];
  } else {
    BitString v = uniform_bitstring(n_, *rng_);
    while (v.none()) v = uniform_bitstring(n_, *rng_);
    v_ = std::move(v);
  }
  position_ = 0;
  all_orthogonal_ = true;
}

void OrthogonalTester::on_feed(const Sample& s) {
  const auto& u = expect<VectorSample>(s, name()).u;
  if (position_ == 0) start_iteration();
  if (inner_product(u, *v_)) all_orthogonal_ = false;
  if (++position_ == per_iter_) {
    if (all_orthogonal_) {
      accepted_ = true;
    } else {
      ++iteration_;
      position_ = 0;
    }
  }
}

bool OrthogonalTester::on_decide() {
  if (accepted_) return true;
  if (iteration_ >= iterations_) return false;
  throw InsufficientSamples("orthogonal_tester: stream ended mid-schedule");
}

std::size_t OrthogonalTester::retained_bits() const {
  return n_ + 1 + counter_bits(per_iter_) + counter_bits(iterations_);
}

std::size_t OrthogonalTester::declared_bound() const { return retained_bits(); }

// ---- RankThreshold ----

RankThreshold::RankThreshold(std::size_t r, std::size_t window, std::size_t n_eff)
    : r_(r), window_(window), n_eff_(n_eff) {
  if (window_ == 0 || n_eff_ == 0) throw std::invalid_argument("rank_threshold: window and n_eff must be positive");
  stored_.reserve(window_);
}

void RankThreshold::on_feed(const Sample& s) {
  const auto& u = expect<VectorSample>(s, name()).u;
  if (u.size() < n_eff_) throw DimensionError("rank_threshold: sample shorter than n_eff");
  BitString head(n_eff_);
  for (std::size_t i = 0; i < n_eff_; ++i) head.set(i, u.test(i));
  stored_.push_back(std::move(head));
}

bool RankThreshold::on_decide() {
  if (stored_.size() < window_) throw InsufficientSamples("rank_threshold: stream shorter than window");
  return rank(std::span<const BitString>(stored_)) <= r_;
}

std::size_t RankThreshold::retained_bits() const { return stored_.size() * n_eff_ + counter_bits(window_); }

std::size_t RankThreshold::declared_bound() const { return window_ * n_eff_ + counter_bits(window_); }

// ---- SparseSatTester ----

SparseSatTester::SparseSatTester(std::size_t n, std::optional<std::size_t> m0) : n_(n), m0_(m0.value_or(4 * n)) {
  if (n == 0 || m0_ == 0) throw std::invalid_argument("sparse_sat: n and m0 must be positive");
  stored_.reserve(m0_);
}

void SparseSatTester::on_feed(const Sample& s) {
  const auto& e = expect<EquationSample>(s, name());
  if (e.a.size() != n_) throw DimensionError("sparse_sat: equation length != n");
  stored_.push_back(e);
}

bool SparseSatTester::on_decide() {
  if (stored_.size() < m0_) throw InsufficientSamples("sparse_sat: stream shorter than m0");
  EchelonBasis basis(n_);
  for (const auto& e : stored_) {
    basis.insert(e.a, e.b);
    if (basis.contradiction()) return false;
  }
  return true;
}

std::size_t SparseSatTester::retained_bits() const { return stored_.size() * (n_ + 1); }

std::size_t SparseSatTester::declared_bound() const { return m0_ * (n_ + 1); }

// ---- SparseFixedQuery ----

double fixed_query_hit_probability(std::size_t n, std::size_t k) {
  const double p = static_cast<double>(k) / static_cast<double>(n);
  return p * std::pow(1.0 - p, static_cast<double>(n - 1));
}

SparseFixedQuery::SparseFixedQuery(std::size_t n, std::size_t k, std::size_t quota,
                                   std::optional<std::size_t> max_samples)
    : n_(n), quota_(quota), max_samples_(0) {
  if (k == 0 || k >= n) throw std::invalid_argument("sparse_fixed_query: need 0 < k < n");
  if (quota == 0) throw std::invalid_argument("sparse_fixed_query: quota must be positive");
  max_samples_ = max_samples.value_or(static_cast<std::size_t>(
      std::ceil(4.0 * static_cast<double>(quota) / fixed_query_hit_probability(n, k))));
  if (max_samples_ == 0) throw std::invalid_argument("sparse_fixed_query: max_samples must be positive");
}

void SparseFixedQuery::on_feed(const Sample& s) {
  const auto& e = expect<EquationSample>(s, name());
  if (e.a.size() != n_) throw DimensionError("sparse_fixed_query: equation length != n");
  if (e.a.test(0) && e.a.popcount() == 1) bits_.push_back(e.b);
}

bool SparseFixedQuery::on_decide() {
  if (!quota_reached()) return true;
  return std::all_of(bits_.begin(), bits_.end(), [&](bool b) { return b == bits_.front(); });
}

std::size_t SparseFixedQuery::retained_bits() const {
  return bits_.size() + counter_bits(quota_) + counter_bits(max_samples_);
}

std::size_t SparseFixedQuery::declared_bound() const {
  return quota_ + counter_bits(quota_) + counter_bits(max_samples_);
}

// ---- LocalPrefix ----

std::size_t local_prefix_default_max_samples(std::size_t n, std::size_t k, std::size_t w, std::size_t count) {
  // q = w(w-1)...(w-k+1) / n(n-1)...(n-k+1), formed as a product of ratios.
  double q = 1.0;
  for (std::size_t i = 0; i < k; ++i) q *= static_cast<double>(w - i) / static_cast<double>(n - i);
  return static_cast<std::size_t>(std::ceil(2.0 * static_cast<double>(count) / q));
}

LocalPrefix::LocalPrefix(std::size_t n, Predicate p, std::size_t w, std::optional<std::size_t> count,
                         std::optional<std::size_t> max_samples)
    : n_(n), p_(std::move(p)), w_(w), count_(count.value_or(2 * w)), max_samples_(0) {
  if (w_ < p_.arity() || w_ > n_) throw std::invalid_argument("local_prefix: need k <= w <= n");
  if (w_ > 24) throw std::invalid_argument("local_prefix: w above 24 is not enumerable");
  if (count_ == 0) throw std::invalid_argument("local_prefix: count must be positive");
  max_samples_ = max_samples.value_or(local_prefix_default_max_samples(n_, p_.arity(), w_, count_));
  stored_.reserve(count_);
}

void LocalPrefix::on_feed(const Sample& s) {
  const auto& l = expect<LocalSample>(s, name());
  if (l.a.n() != n_ || l.a.k() != p_.arity()) throw DimensionError("local_prefix: tuple shape mismatch");
  for (auto i : l.a.indices()) {
    if (i >= w_) return;
  }
  stored_.push_back(l);
}

bool LocalPrefix::on_decide() {
  if (stored_.size() < count_) return true;
  const std::size_t k = p_.arity();
  const auto& table = p_.truth_table();
  for (std::uint32_t y = 0; y < (std::uint32_t{1} << w_); ++y) {
    bool consistent = true;
    for (const auto& s : stored_) {
      std::uint32_t index = 0;
      for (std::size_t i = 0; i < k; ++i) index = (index << 1) | ((y >> s.a[i]) & 1U);
      if ((table[index] != 0) != s.b) {
        consistent = false;
        break;
      }
    }
    if (consistent) return true;
  }
  return false;
}

std::size_t LocalPrefix::sample_bits() const { return p_.arity() * ceil_log2(n_) + 1; }

std::size_t LocalPrefix::retained_bits() const {
  return stored_.size() * sample_bits() + w_ + counter_bits(count_) + counter_bits(max_samples_);
}

std::size_t LocalPrefix::declared_bound() const {
  return count_ * sample_bits() + w_ + counter_bits(count_) + counter_bits(max_samples_);
}

// ---- factory ----

namespace {

class Params {
 public:
  Params(const ParamMap& map, std::string_view who) : map_(map), who_(who) {}

  std::optional<std::size_t> count(const std::string& key) {
    used_.insert(key);
    const auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    const double v = it->second;
    if (!(v >= 0) || v != std::floor(v) || v > 9.0e15) {
      throw std::invalid_argument(who_ + ": parameter " + key + " must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
  }

  std::size_t count_or(const std::string& key, std::size_t fallback) { return count(key).value_or(fallback); }

  void finish() const {
    for (const auto& [key, value] : map_) {
      if (!used_.count(key)) throw std::invalid_argument(who_ + ": unknown parameter " + key);
    }
  }

 private:
  const ParamMap& map_;
  std::string who_;
  std::set<std::string> used_;
};

void require_family(const SourceSpec& spec, Family f, std::string_view who) {
  if (spec.family != f) {
    throw std::invalid_argument(std::string(who) + " cannot read a " + std::string(family_name(spec.family)) +
                                " source");
  }
}

}  // namespace

const std::vector<std::string>& distinguisher_names() {
  static const std::vector<std::string> names = {"subspace_rank",      "orthogonal_tester", "rank_threshold",
                                                 "sparse_sat",         "sparse_fixed_query", "local_prefix",
                                                 "constant",           "coin_flip"};
  return names;
}

std::unique_ptr<Distinguisher> make_distinguisher(const std::string& name, const ParamMap& params,
                                                  const SourceSpec& spec, std::uint64_t seed) {
  Params p(params, name);
  std::unique_ptr<Distinguisher> out;
  if (name == "subspace_rank") {
    require_family(spec, Family::subspace, name);
    const auto k = p.count_or("k", spec.k);
    const auto n = p.count_or("n", spec.n);
    out = std::make_unique<SubspaceRankTester>(k, n, p.count("window"));
  } else if (name == "orthogonal_tester") {
    require_family(spec, Family::subspace, name);
    const auto k = p.count_or("k", spec.k);
    const auto n = p.count_or("n", spec.n);
    const auto iterations = p.count("iterations");
    out = std::make_unique<OrthogonalTester>(k, n, seed, iterations, p.count("per_iter"));
  } else if (name == "rank_threshold") {
    require_family(spec, Family::subspace, name);
    const auto r = p.count_or("r", spec.k);
    const auto window = p.count_or("window", 8 * (r + 1));
    out = std::make_unique<RankThreshold>(r, window, p.count_or("n_eff", spec.n));
  } else if (name == "sparse_sat") {
    require_family(spec, Family::sparse_parity, name);
    const auto n = p.count_or("n", spec.n);
    out = std::make_unique<SparseSatTester>(n, p.count("m0"));
  } else if (name == "sparse_fixed_query") {
    require_family(spec, Family::sparse_parity, name);
    const auto n = p.count_or("n", spec.n);
    const auto k = p.count_or("k", spec.k);
    const auto quota = p.count_or("quota", 5);
    out = std::make_unique<SparseFixedQuery>(n, k, quota, p.count("max_samples"));
  } else if (name == "local_prefix") {
    require_family(spec, Family::local_prg, name);
    const auto w = p.count("w");
    if (!w) throw std::invalid_argument("local_prefix: parameter w is required");
    const auto count = p.count("count");
    out = std::make_unique<LocalPrefix>(spec.n, *spec.predicate, *w, count, p.count("max_samples"));
  } else if (name == "constant") {
    const auto value = p.count_or("value", 1);
    if (value > 1) throw std::invalid_argument("constant: value must be 0 or 1");
    out = std::make_unique<ConstantDistinguisher>(value == 1);
  } else if (name == "coin_flip") {
    out = std::make_unique<CoinFlipDistinguisher>(seed);
  } else {
    throw std::invalid_argument("unknown distinguisher: " + name);
  }
  p.finish();
  return out;
}

DistinguisherFactory distinguisher_factory(const std::string& name, const ParamMap& params, const SourceSpec& spec) {
  // Build once eagerly so configuration errors surface before any trial runs.
  make_distinguisher(name, params, spec, 0);
  return [name, params, spec](std::uint64_t seed) { return make_distinguisher(name, params, spec, seed); };
}

}  // namespace streamdist
