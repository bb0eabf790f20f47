#include "streamdist/bitstring.hpp"

#include <bit>
#include <stdexcept>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t length) { return (length + kWordBits - 1) / kWordBits; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitString::BitString(std::size_t length) : length_(length), words_(word_count(length), 0) {
  if (length == 0) throw DimensionError("BitString length must be at least 1");
}

BitString BitString::from_string(std::string_view bits) {
  BitString out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set(i);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("BitString::from_string: expected only '0' and '1'");
    }
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t length) {
  if (length > kWordBits) throw DimensionError("BitString::from_uint: length exceeds 64");
  BitString out(length);
  out.words_[0] = length == kWordBits ? value : value & ((std::uint64_t{1} << length) - 1);
  return out;
}

BitString BitString::from_hex(std::string_view hex, std::size_t length) {
  if (hex.size() != (length + 3) / 4) {
    throw DimensionError("BitString::from_hex: digit count does not match length");
  }
  BitString out(length);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const int v = hex_value(hex[d]);
    if (v < 0) throw std::invalid_argument("BitString::from_hex: bad hex digit");
    for (std::size_t b = 0; b < 4; ++b) {
      const bool bit = ((v >> (3 - b)) & 1) != 0;
      const std::size_t i = 4 * d + b;
      if (i < length) {
        out.set(i, bit);
      } else if (bit) {
        throw std::invalid_argument("BitString::from_hex: nonzero padding bits");
      }
    }
  }
  return out;
}

void BitString::check_index(std::size_t i) const {
  if (i >= length_) throw std::out_of_range("BitString index out of range");
}

void BitString::check_same_length(const BitString& other) const {
  if (other.length_ != length_) throw DimensionError("BitString length mismatch");
}

bool BitString::test(std::size_t i) const {
  check_index(i);
  return ((words_[i / kWordBits] >> (i % kWordBits)) & 1U) != 0;
}

void BitString::set(std::size_t i, bool value) {
  check_index(i);
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (value) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

void BitString::flip(std::size_t i) {
  check_index(i);
  words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
}

std::size_t BitString::popcount() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool BitString::any() const noexcept {
  for (auto w : words_) {
    if (w != 0) return true;
  }
  return false;
}

std::size_t BitString::find_first() const noexcept {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] != 0) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
  }
  return length_;
}

BitString& BitString::operator^=(const BitString& other) {
  check_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

BitString& BitString::operator&=(const BitString& other) {
  check_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

std::string BitString::to_string() const {
  std::string out(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (test(i)) out[i] = '1';
  }
  return out;
}

std::uint64_t BitString::to_uint() const {
  if (length_ > kWordBits) throw DimensionError("BitString::to_uint: length exceeds 64");
  return words_[0];
}

std::string BitString::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out((length_ + 3) / 4, '0');
  for (std::size_t d = 0; d < out.size(); ++d) {
    int v = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = 4 * d + b;
      v = (v << 1) | ((i < length_ && test(i)) ? 1 : 0);
    }
    out[d] = kDigits[v];
  }
  return out;
}

}  // namespace streamdist
