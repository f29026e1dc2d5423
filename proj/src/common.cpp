// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/common.hpp"

#include <algorithm>
#include <cmath>

#include "fprg/bits.hpp"

namespace fprg {

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

Alphabet Alphabet::of(u64 m) {
  if (m == 0) throw UsageError("alphabet size must be positive");
  Alphabet a;
  a.pow2_ = fprg::is_pow2(m);
  a.bits_ = ceil_log2(m);
  a.size_ = m;
  return a;
}

Alphabet Alphabet::pow2(unsigned bits) {
  Alphabet a;
  a.pow2_ = true;
  a.bits_ = bits;
  a.size_ = bits < 64 ? (u64{1} << bits) : 0;
  return a;
}

double Alphabet::log2() const { return pow2_ ? static_cast<double>(bits_) : std::log2(static_cast<double>(size_)); }

u64 Alphabet::size() const {
  if (!materializable()) throw RefusalError("alphabet 2^" + std::to_string(bits_) + " is too wide to materialize");
  return size_;
}

std::string Alphabet::to_string() const {
  if (pow2_ && bits_ >= 64) return "2^" + std::to_string(bits_);
  return std::to_string(size_);
}

Alphabet Alphabet::parse(const std::string& s) {
  if (s.rfind("2^", 0) == 0) return pow2(static_cast<unsigned>(std::stoul(s.substr(2))));
  return of(std::stoull(s));
}

// ---- BitString ----

BitString BitString::from_uint(u64 value, std::size_t nbits) {
  BitString b;
  b.append(value, static_cast<unsigned>(nbits));
  return b;
}

static int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

BitString BitString::from_hex(std::string_view hex) {
  if (hex.starts_with("0x")) hex.remove_prefix(2);
  BitString b;
  for (char c : hex) {
    int d = hex_digit(c);
    if (d < 0) throw UsageError("invalid hex digit in seed");
    b.append(static_cast<u64>(d), 4);
  }
  return b;
}

BitString BitString::from_hex(std::string_view hex, std::size_t nbits) {
  BitString full = from_hex(hex);
  if (full.size() < nbits)
    throw UsageError("seed has " + std::to_string(full.size()) + " bits, need " + std::to_string(nbits));
  for (std::size_t i = nbits; i < full.size(); ++i)
    if (full.get(i)) throw UsageError("seed has nonzero bits beyond its length");
  return full.slice(0, nbits);
}

void BitString::set(std::size_t i, bool v) {
  std::uint8_t m = static_cast<std::uint8_t>(0x80u >> (i & 7));
  if (v)
    bytes_[i >> 3] |= m;
  else
    bytes_[i >> 3] &= static_cast<std::uint8_t>(~m);
}

void BitString::append(u64 value, unsigned nbits) {
  std::size_t pos = nbits_;
  nbits_ += nbits;
  bytes_.resize((nbits_ + 7) / 8, 0);
  if (nbits > 64) {  // leading zeros
    pos += nbits - 64;
    nbits = 64;
  }
  // bits past nbits_ are always zero, so OR-ing chunks in is enough
  while (nbits) {
    unsigned free = 8 - static_cast<unsigned>(pos & 7);
    unsigned take = std::min(free, nbits);
    u64 chunk = (value >> (nbits - take)) & ((1u << take) - 1);
    bytes_[pos >> 3] |= static_cast<std::uint8_t>(chunk << (free - take));
    pos += take;
    nbits -= take;
  }
}

void BitString::assign_uint(u64 value, std::size_t nbits) {
  bytes_.assign((nbits + 7) / 8, 0);
  nbits_ = 0;
  append(value, static_cast<unsigned>(nbits));
}

void BitString::append(const BitString& other) {
  std::size_t pos = nbits_;
  nbits_ += other.nbits_;
  bytes_.resize((nbits_ + 7) / 8, 0);
  for (std::size_t k = 0; k < other.nbits_; ++k) set(pos + k, other.get(k));
}

u64 BitString::read(std::size_t pos, unsigned nbits) const {
  if (pos + nbits > nbits_) throw UsageError("seed too short");
  if (nbits == 0) return 0;
  std::size_t first = pos >> 3, last = (pos + nbits - 1) >> 3;
  u128 acc = 0;
  for (std::size_t b = first; b <= last; ++b) acc = (acc << 8) | bytes_[b];
  unsigned drop = static_cast<unsigned>((last - first + 1) * 8 - (pos & 7) - nbits);
  acc >>= drop;
  return nbits == 64 ? static_cast<u64>(acc) : static_cast<u64>(acc) & ((u64{1} << nbits) - 1);
}

BitString BitString::slice(std::size_t pos, std::size_t nbits) const {
  if (pos + nbits > nbits_) throw UsageError("slice out of range");
  BitString b(nbits);
  for (std::size_t k = 0; k < nbits; ++k) b.set(k, get(pos + k));
  return b;
}

std::string BitString::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  std::size_t nd = (nbits_ + 3) / 4;
  s.reserve(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    unsigned v = 0;
    for (unsigned k = 0; k < 4; ++k) {
      std::size_t i = d * 4 + k;
      v = (v << 1) | (i < nbits_ ? static_cast<unsigned>(get(i)) : 0u);
    }
    s.push_back(digits[v]);
  }
  return s;
}

// ---- BitReader ----

u64 BitReader::take(unsigned nbits) {
  u64 v = s_->read(pos_, nbits);
  pos_ += nbits;
  return v;
}

std::vector<u64> BitReader::take_words(std::size_t nbits) {
  std::size_t nw = (nbits + 63) / 64;
  std::vector<u64> w(nw, 0);
  if (nw == 0) return w;
  // the leading bits form the (possibly partial) top word
  std::size_t top = nbits - (nw - 1) * 64;
  w[nw - 1] = take(static_cast<unsigned>(top));
  for (std::size_t i = nw - 1; i-- > 0;) w[i] = take(64);
  return w;
}

BitString BitReader::take_bits(std::size_t nbits) {
  BitString b = s_->slice(pos_, nbits);
  pos_ += nbits;
  return b;
}

void BitReader::skip(std::size_t nbits) {
  if (pos_ + nbits > s_->size()) throw UsageError("seed too short");
  pos_ += nbits;
}

}  // namespace fprg
