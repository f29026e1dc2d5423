// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fprg/common.hpp"

namespace fprg {

// Bit string, big-endian: bit 0 is the MSB of byte 0.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}

  // Low nbits of value, MSB first. nbits <= 64.
  static BitString from_uint(u64 value, std::size_t nbits);
  // Lowercase or uppercase hex; the bit length is 4 * digits unless nbits is given
  // (then the string must hold at least nbits bits; surplus trailing bits must be zero).
  static BitString from_hex(std::string_view hex);
  static BitString from_hex(std::string_view hex, std::size_t nbits);

  std::size_t size() const { return nbits_; }
  bool get(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1; }
  void set(std::size_t i, bool v);
  void append(u64 value, unsigned nbits);
  void append(const BitString& other);
  // Reuses the buffer: becomes from_uint(value, nbits).
  void assign_uint(u64 value, std::size_t nbits);

  // Bits [pos, pos+nbits) as an integer, MSB first. nbits <= 64.
  u64 read(std::size_t pos, unsigned nbits) const;
  BitString slice(std::size_t pos, std::size_t nbits) const;

  std::string to_hex() const;
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  bool operator==(const BitString& o) const { return nbits_ == o.nbits_ && bytes_ == o.bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t nbits_ = 0;
};

// Sequential consumer of a seed; every generator node takes exactly its seed_bits.
class BitReader {
 public:
  explicit BitReader(const BitString& s, std::size_t pos = 0) : s_(&s), pos_(pos) {}

  u64 take(unsigned nbits);
  // The next nbits as a little-endian word vector: word 0 holds the lowest 64 bits.
  std::vector<u64> take_words(std::size_t nbits);
  BitString take_bits(std::size_t nbits);
  void skip(std::size_t nbits);
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return s_->size() - pos_; }

 private:
  const BitString* s_;
  std::size_t pos_;
};

}  // namespace fprg
