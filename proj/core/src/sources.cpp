#include "streamdist/sources.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

BitString span_sample(const std::vector<BitString>& basis, std::size_t n, Rng& rng) {
  BitString u(n);
  for (const auto& v : basis) {
    if (rng.bit()) u ^= v;
  }
  return u;
}

bool parse_bit(std::string_view s) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::invalid_argument("expected b=0 or b=1");
}

std::string_view strip_prefix(std::string_view field, std::string_view prefix) {
  if (field.substr(0, prefix.size()) != prefix) {
    throw std::invalid_argument("expected field starting with '" + std::string(prefix) + "'");
  }
  return field.substr(prefix.size());
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::subspace:
      return "subspace";
    case Family::sparse_parity:
      return "sparse_parity";
    case Family::local_prg:
      return "local_prg";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "subspace") return Family::subspace;
  if (name == "sparse_parity" || name == "sparse") return Family::sparse_parity;
  if (name == "local_prg" || name == "local") return Family::local_prg;
  throw std::invalid_argument("unknown source family: " + std::string(name));
}

SourceSpec SourceSpec::subspace(std::size_t n, std::size_t k) {
  SourceSpec s{Family::subspace, n, k, std::nullopt};
  s.validate();
  return s;
}

SourceSpec SourceSpec::sparse_parity(std::size_t n, std::size_t k) {
  SourceSpec s{Family::sparse_parity, n, k, std::nullopt};
  s.validate();
  return s;
}

SourceSpec SourceSpec::local_prg(std::size_t n, Predicate p) {
  const std::size_t k = p.arity();
  SourceSpec s{Family::local_prg, n, k, std::move(p)};
  s.validate();
  return s;
}

void SourceSpec::validate() const {
  if (n == 0) throw std::invalid_argument("source dimension n must be at least 1");
  switch (family) {
    case Family::subspace:
      if (k > n) throw std::invalid_argument("subspace: need 0 <= k <= n");
      break;
    case Family::sparse_parity:
      if (k == 0 || k >= n) throw std::invalid_argument("sparse_parity: need 0 < k < n");
      break;
    case Family::local_prg:
      if (!predicate) throw std::invalid_argument("local_prg: predicate required");
      if (predicate->arity() != k) throw std::invalid_argument("local_prg: k must equal predicate arity");
      if (k < 1 || k > n) throw std::invalid_argument("local_prg: need 1 <= arity <= n");
      break;
  }
}

const BitString& Instance::seed_x() const {
  if (const auto* x = std::get_if<BitString>(&hidden)) return *x;
  throw std::logic_error("instance has no hidden seed vector");
}

const std::vector<BitString>& Instance::basis() const {
  if (const auto* b = std::get_if<std::vector<BitString>>(&hidden)) return *b;
  throw std::logic_error("instance has no hidden basis");
}

Instance draw_instance(const SourceSpec& spec, Rng& rng, std::optional<bool> forced_bit) {
  spec.validate();
  const bool b = forced_bit ? *forced_bit : rng.bit();
  if (!b) return null_instance(spec);
  if (spec.family == Family::subspace) return Instance{spec, true, sample_subspace_basis(spec.n, spec.k, rng)};
  return Instance{spec, true, uniform_bitstring(spec.n, rng)};
}

Instance planted_instance(const SourceSpec& spec, HiddenSeed hidden) {
  spec.validate();
  if (spec.family == Family::subspace) {
    const auto* basis = std::get_if<std::vector<BitString>>(&hidden);
    if (!basis) throw std::invalid_argument("subspace instance needs a basis");
    if (basis->size() != spec.k) throw DimensionError("basis size must equal k");
    for (const auto& v : *basis) {
      if (v.size() != spec.n) throw DimensionError("basis vector length must equal n");
    }
    if (rank(std::span<const BitString>(*basis)) != spec.k) {
      throw std::invalid_argument("basis vectors must be linearly independent");
    }
  } else {
    const auto* x = std::get_if<BitString>(&hidden);
    if (!x) throw std::invalid_argument("instance needs a seed vector x");
    if (x->size() != spec.n) throw DimensionError("seed length must equal n");
  }
  return Instance{spec, true, std::move(hidden)};
}

Instance null_instance(const SourceSpec& spec) {
  spec.validate();
  return Instance{spec, false, std::monostate{}};
}

Sample next_sample(const Instance& inst, Rng& rng) {
  const SourceSpec& spec = inst.spec;
  switch (spec.family) {
    case Family::subspace:
      if (inst.truth_bit) return VectorSample{span_sample(inst.basis(), spec.n, rng)};
      return VectorSample{uniform_bitstring(spec.n, rng)};
    case Family::sparse_parity: {
      BitString a = sample_sparse_vector(spec.n, spec.sparse_rate(), rng);
      const bool b = inst.truth_bit ? inner_product(a, inst.seed_x()) : rng.bit();
      return EquationSample{std::move(a), b};
    }
    case Family::local_prg: {
      OrderedTuple a = sample_ordered_tuple(spec.n, spec.k, rng);
      const bool b = inst.truth_bit ? spec.predicate->evaluate(project(inst.seed_x(), a)) : rng.bit();
      return LocalSample{std::move(a), b};
    }
  }
  throw std::logic_error("unreachable family");
}

InstanceStream::InstanceStream(Instance inst, std::uint64_t seed, std::optional<std::size_t> limit)
    : inst_(std::move(inst)), rng_(seed), limit_(limit) {}

std::optional<Sample> InstanceStream::next() {
  if (limit_ && consumed_ >= *limit_) return std::nullopt;
  ++consumed_;
  return next_sample(inst_, rng_);
}

HybridStream::HybridStream(const SourceSpec& spec, BitString x, std::size_t j, std::size_t m, std::uint64_t seed)
    : planted_(planted_instance(spec, std::move(x))), null_(null_instance(spec)), j_(j), m_(m), rng_(seed) {
  if (spec.family != Family::local_prg) throw std::invalid_argument("hybrid streams need a local_prg source");
  if (j > m) throw std::invalid_argument("hybrid index j exceeds stream length m");
}

std::optional<Sample> HybridStream::next() {
  if (consumed_ >= m_) return std::nullopt;
  const bool planted = consumed_ < j_;
  ++consumed_;
  return next_sample(planted ? planted_ : null_, rng_);
}

std::vector<Sample> hybrid_stream(const BitString& x, std::size_t j, std::size_t m, const SourceSpec& spec, Rng& rng) {
  HybridStream stream(spec, x, j, m, rng());
  std::vector<Sample> out;
  out.reserve(m);
  while (auto s = stream.next()) out.push_back(std::move(*s));
  return out;
}

SinglePassStream::SinglePassStream(std::vector<Sample> samples) : samples_(std::move(samples)) {}

std::optional<Sample> SinglePassStream::next() {
  if (consumed_ >= samples_.size()) return std::nullopt;
  return std::move(samples_[consumed_++]);
}

void SinglePassStream::rewind() { throw std::logic_error("SinglePassStream: samples cannot be re-read"); }

std::string format_sample(const Sample& s) {
  return std::visit(Overloaded{
                        [](const VectorSample& v) { return "u=" + v.u.to_hex(); },
                        [](const EquationSample& e) {
                          return "a=" + e.a.to_hex() + " b=" + (e.b ? "1" : "0");
                        },
                        [](const LocalSample& l) {
                          std::string out = "a=";
                          for (std::size_t i = 0; i < l.a.k(); ++i) {
                            if (i) out += ',';
                            out += std::to_string(l.a[i] + 1);
                          }
                          return out + " b=" + (l.b ? "1" : "0");
                        },
                    },
                    s);
}

Sample parse_sample(std::string_view line, const SourceSpec& spec) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
  const auto space = line.find(' ');
  const std::string_view first = line.substr(0, space);
  switch (spec.family) {
    case Family::subspace:
      if (space != std::string_view::npos) throw std::invalid_argument("subspace sample has one field");
      return VectorSample{BitString::from_hex(strip_prefix(first, "u="), spec.n)};
    case Family::sparse_parity: {
      if (space == std::string_view::npos) throw std::invalid_argument("equation sample needs a b field");
      return EquationSample{BitString::from_hex(strip_prefix(first, "a="), spec.n),
                            parse_bit(strip_prefix(line.substr(space + 1), "b="))};
    }
    case Family::local_prg: {
      if (space == std::string_view::npos) throw std::invalid_argument("local sample needs a b field");
      std::string_view list = strip_prefix(first, "a=");
      std::vector<std::uint32_t> idx;
      while (!list.empty()) {
        const auto comma = list.find(',');
        const std::string_view item = list.substr(0, comma);
        std::uint32_t value = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc() || ptr != item.data() + item.size() || value == 0) {
          throw std::invalid_argument("tuple indices must be positive integers");
        }
        idx.push_back(value - 1);
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
      }
      if (idx.size() != spec.k) throw DimensionError("tuple arity does not match the source");
      return LocalSample{OrderedTuple(std::move(idx), spec.n), parse_bit(strip_prefix(line.substr(space + 1), "b="))};
    }
  }
  throw std::logic_error("unreachable family");
}

std::uint64_t alphabet_code(const Sample& s) {
  return std::visit(Overloaded{
                        [](const VectorSample& v) { return v.u.to_uint(); },
                        [](const EquationSample& e) {
                          if (e.a.size() > 63) throw DimensionError("alphabet_code: n must be at most 63");
                          return 2 * e.a.to_uint() + (e.b ? 1 : 0);
                        },
                        [](const LocalSample& l) { return 2 * tuple_rank(l.a) + (l.b ? 1 : 0); },
                    },
                    s);
}

std::uint64_t alphabet_size(const SourceSpec& spec) {
  switch (spec.family) {
    case Family::subspace:
      if (spec.n > 63) throw DimensionError("alphabet_size: n must be at most 63");
      return std::uint64_t{1} << spec.n;
    case Family::sparse_parity:
      if (spec.n > 62) throw DimensionError("alphabet_size: n must be at most 62");
      return std::uint64_t{2} << spec.n;
    case Family::local_prg:
      return 2 * falling_factorial(spec.n, spec.k);
  }
  throw std::logic_error("unreachable family");
}

}  // namespace streamdist
