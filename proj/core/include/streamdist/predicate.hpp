#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "streamdist/bitstring.hpp"

namespace streamdist {

inline constexpr std::size_t kMaxArity = 20;

/// Index of a k-bit input in a truth table. Position i of the input is
/// weighted 2^(k-1-i), so the first position is the most significant bit.
std::uint32_t truth_table_index(const BitString& input);

/// A k-ary boolean function stored as its 2^k-entry truth table.
class Predicate {
 public:
  /// truth_table.size() must equal 2^k; entries must be 0 or 1.
  Predicate(std::size_t k, std::vector<std::uint8_t> truth_table);

  std::size_t arity() const noexcept { return k_; }
  const std::vector<std::uint8_t>& truth_table() const noexcept { return table_; }

  bool evaluate(const BitString& input) const;
  bool at(std::uint32_t index) const { return table_.at(index) != 0; }

  /// Exactly half of all inputs map to 1.
  bool balanced() const noexcept;

  /// Truth table as a string of '0'/'1' in index order.
  std::string table_string() const;

  friend bool operator==(const Predicate&, const Predicate&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint8_t> table_;
};

/// Fourier coefficients of (-1)^P. P̂(alpha) = numerators[alpha] / 2^k,
/// with alpha encoded like a truth-table index.
struct Spectrum {
  std::size_t arity = 0;
  std::vector<std::int64_t> numerators;

  double coefficient(std::uint32_t alpha) const;
};

Spectrum walsh_hadamard(const Predicate& p);

/// Recovers the truth table from a spectrum. Throws std::invalid_argument
/// if the spectrum is not that of a boolean function.
Predicate inverse_walsh_hadamard(const Spectrum& s);

/// Smallest |alpha| with a nonzero coefficient. Constant predicates give 0.
std::size_t resilience(const Spectrum& s);
std::size_t resilience(const Predicate& p);

/// Named predicates: "xor" (any k), "and" (any k), "maj" (odd k),
/// "tsa" (k = 5, x1 ^ x2 ^ x3 ^ (x4 & x5)), "const0"/"const1" (any k).
Predicate builtin_predicate(std::string_view name, std::size_t k);

/// Reads "k" on the first line and 2^k characters of 0/1 on the second.
/// Throws ParseError with the offending line number.
Predicate parse_predicate(std::istream& in);
Predicate load_predicate(const std::filesystem::path& path);

}  // namespace streamdist
