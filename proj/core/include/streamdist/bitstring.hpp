#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace streamdist {

/// Fixed-length vector over GF(2), packed 64 bits per word.
///
/// Bit i lives in word i / 64 at position i % 64; unused high bits of the
/// last word are always zero, so word-wise comparison is bitwise equality.
/// Indices are 0-based: the mathematical coordinate x^j is bit j - 1.
class BitString {
 public:
  /// All-zero string of `length` bits. length must be at least 1.
  explicit BitString(std::size_t length);

  /// "10110" -> bits 0..4 = 1,0,1,1,0.
  static BitString from_string(std::string_view bits);
  /// Bit i = (value >> i) & 1. length <= 64.
  static BitString from_uint(std::uint64_t value, std::size_t length);
  /// Inverse of to_hex for a known length.
  static BitString from_hex(std::string_view hex, std::size_t length);

  std::size_t size() const noexcept { return length_; }

  bool test(std::size_t i) const;
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i);

  std::size_t popcount() const noexcept;
  bool parity() const noexcept { return (popcount() & 1U) != 0; }
  bool any() const noexcept;
  bool none() const noexcept { return !any(); }

  /// Index of the lowest set bit, or size() when none is set.
  std::size_t find_first() const noexcept;

  BitString& operator^=(const BitString& other);
  BitString& operator&=(const BitString& other);
  friend BitString operator^(BitString lhs, const BitString& rhs) { return lhs ^= rhs; }
  friend BitString operator&(BitString lhs, const BitString& rhs) { return lhs &= rhs; }
  friend bool operator==(const BitString&, const BitString&) = default;

  /// Bits 0..size()-1 as '0'/'1' characters.
  std::string to_string() const;
  /// Integer with bit i = test(i). size() <= 64.
  std::uint64_t to_uint() const;
  /// Bits grouped into nibbles in index order; bit 4j is the most
  /// significant bit of hex digit j, and the final digit is zero-padded.
  std::string to_hex() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

 private:
  void check_index(std::size_t i) const;
  void check_same_length(const BitString& other) const;

  std::size_t length_;
  std::vector<std::uint64_t> words_;
};

}  // namespace streamdist
