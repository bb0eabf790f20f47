#include "streamdist/predicate.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

void check_arity(std::size_t k) {
  if (k < 1 || k > kMaxArity) throw std::domain_error("predicate arity must be in [1, 20]");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class Rule>
Predicate tabulate(std::size_t k, Rule rule) {
  check_arity(k);
  std::vector<std::uint8_t> table(std::size_t{1} << k);
  for (std::uint32_t x = 0; x < table.size(); ++x) {
    // bits[i] is input position i.
    std::vector<int> bits(k);
    for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<int>((x >> (k - 1 - i)) & 1U);
    table[x] = static_cast<std::uint8_t>(rule(bits) ? 1 : 0);
  }
  return Predicate(k, std::move(table));
}

}  // namespace

std::uint32_t truth_table_index(const BitString& input) {
  check_arity(input.size());
  std::uint32_t index = 0;
  for (std::size_t i = 0; i < input.size(); ++i) index = (index << 1) | (input.test(i) ? 1U : 0U);
  return index;
}

Predicate::Predicate(std::size_t k, std::vector<std::uint8_t> truth_table)
    : k_(k), table_(std::move(truth_table)) {
  check_arity(k);
  if (table_.size() != (std::size_t{1} << k)) throw DimensionError("truth table length must be 2^k");
  for (auto v : table_) {
    if (v > 1) throw std::invalid_argument("truth table entries must be 0 or 1");
  }
}

bool Predicate::evaluate(const BitString& input) const {
  if (input.size() != k_) throw DimensionError("Predicate::evaluate: input length != arity");
  return table_[truth_table_index(input)] != 0;
}

bool Predicate::balanced() const noexcept {
  std::size_t ones = 0;
  for (auto v : table_) ones += v;
  return 2 * ones == table_.size();
}

std::string Predicate::table_string() const {
  std::string out(table_.size(), '0');
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i]) out[i] = '1';
  }
  return out;
}

double Spectrum::coefficient(std::uint32_t alpha) const {
  return static_cast<double>(numerators.at(alpha)) / static_cast<double>(std::uint64_t{1} << arity);
}

Spectrum walsh_hadamard(const Predicate& p) {
  Spectrum s;
  s.arity = p.arity();
  s.numerators.resize(p.truth_table().size());
  for (std::size_t x = 0; x < s.numerators.size(); ++x) s.numerators[x] = p.truth_table()[x] ? -1 : 1;
  const std::size_t size = s.numerators.size();
  for (std::size_t h = 1; h < size; h <<= 1) {
    for (std::size_t i = 0; i < size; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const std::int64_t u = s.numerators[j];
        const std::int64_t v = s.numerators[j + h];
        s.numerators[j] = u + v;
        s.numerators[j + h] = u - v;
      }
    }
  }
  return s;
}

Predicate inverse_walsh_hadamard(const Spectrum& s) {
  check_arity(s.arity);
  const std::size_t size = std::size_t{1} << s.arity;
  if (s.numerators.size() != size) throw DimensionError("spectrum length must be 2^k");
  std::vector<std::int64_t> v = s.numerators;
  for (std::size_t h = 1; h < size; h <<= 1) {
    for (std::size_t i = 0; i < size; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const std::int64_t a = v[j];
        const std::int64_t b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  // Applying the transform twice scales by 2^k.
  const auto scale = static_cast<std::int64_t>(size);
  std::vector<std::uint8_t> table(size);
  for (std::size_t x = 0; x < size; ++x) {
    if (v[x] == scale) {
      table[x] = 0;
    } else if (v[x] == -scale) {
      table[x] = 1;
    } else {
      throw std::invalid_argument("inverse_walsh_hadamard: not the spectrum of a boolean function");
    }
  }
  return Predicate(s.arity, std::move(table));
}

std::size_t resilience(const Spectrum& s) {
  std::size_t best = s.arity + 1;
  for (std::uint32_t alpha = 0; alpha < s.numerators.size(); ++alpha) {
    if (s.numerators[alpha] == 0) continue;
    best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(alpha)));
  }
  return best;
}

std::size_t resilience(const Predicate& p) { return resilience(walsh_hadamard(p)); }

Predicate builtin_predicate(std::string_view name, std::size_t k) {
  if (name == "xor") {
    return tabulate(k, [](const std::vector<int>& b) {
      int acc = 0;
      for (int v : b) acc ^= v;
      return acc != 0;
    });
  }
  if (name == "and") {
    return tabulate(k, [](const std::vector<int>& b) {
      for (int v : b) {
        if (!v) return false;
      }
      return true;
    });
  }
  if (name == "maj") {
    if (k % 2 == 0) throw std::invalid_argument("majority needs odd arity");
    return tabulate(k, [k](const std::vector<int>& b) {
      std::size_t ones = 0;
      for (int v : b) ones += static_cast<std::size_t>(v);
      return 2 * ones > k;
    });
  }
  if (name == "tsa") {
    if (k != 5) throw std::invalid_argument("tsa is defined for k = 5 only");
    return tabulate(k, [](const std::vector<int>& b) { return (b[0] ^ b[1] ^ b[2] ^ (b[3] & b[4])) != 0; });
  }
  if (name == "const0" || name == "const1") {
    const bool value = name == "const1";
    return tabulate(k, [value](const std::vector<int>&) { return value; });
  }
  throw std::invalid_argument("unknown predicate: " + std::string(name));
}

Predicate parse_predicate(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing arity line");
  const std::string first = trim(line);
  std::size_t k = 0;
  try {
    std::size_t used = 0;
    const long value = std::stol(first, &used);
    if (used != first.size() || value < 1 || value > static_cast<long>(kMaxArity)) throw std::out_of_range("");
    k = static_cast<std::size_t>(value);
  } catch (const std::exception&) {
    throw ParseError(1, "arity must be an integer in [1, 20]");
  }
  if (!std::getline(in, line)) throw ParseError(2, "missing truth table line");
  const std::string bits = trim(line);
  if (bits.size() != (std::size_t{1} << k)) {
    throw ParseError(2, "expected " + std::to_string(std::size_t{1} << k) + " truth table characters, got " +
                            std::to_string(bits.size()));
  }
  std::vector<std::uint8_t> table(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw ParseError(2, "truth table must contain only 0 and 1");
    table[i] = static_cast<std::uint8_t>(bits[i] - '0');
  }
  std::size_t extra = 3;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) throw ParseError(extra, "unexpected trailing content");
    ++extra;
  }
  return Predicate(k, std::move(table));
}

Predicate load_predicate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predicate file: " + path.string());
  return parse_predicate(in);
}

}  // namespace streamdist
