// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fprg {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// A generator symbol. Alphabets wider than 64 bits can be planned but not sampled.
using Symbol = std::uint64_t;

// Bad arguments or malformed inputs (CLI exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that is well defined but exceeds a configured budget
// (enumeration cap, DP window, precision, symbol width).
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_pow2(u64 x) { return x != 0 && (x & (x - 1)) == 0; }

// Smallest b with 2^b >= x (0 for x <= 1).
inline unsigned ceil_log2(u64 x) { return x <= 1 ? 0u : 64u - static_cast<unsigned>(std::countl_zero(x - 1)); }

inline unsigned floor_log2(u64 x) { return 63u - static_cast<unsigned>(std::countl_zero(x)); }

inline u64 pow2ceil(u64 x) { return x <= 1 ? 1 : u64{1} << ceil_log2(x); }

inline u64 ceil_div(u64 a, u64 b) { return (a + b - 1) / b; }

std::string u128_to_string(u128 v);

// Alphabet [m]. Either an explicit size that fits in 63 bits or 2^bits for any bits,
// so plans over [2^280] can still be built and measured.
class Alphabet {
 public:
  Alphabet() = default;
  static Alphabet of(u64 m);
  static Alphabet pow2(unsigned bits);

  bool is_pow2() const { return pow2_; }
  // ceil(log2 m)
  unsigned bits() const { return bits_; }
  // log2 m as a real number
  double log2() const;
  // True when symbols fit a Symbol and the size fits u64 arithmetic.
  bool materializable() const { return pow2_ ? bits_ <= 63 : true; }
  // Size as integer; throws RefusalError if not materializable.
  u64 size() const;
  Symbol mask() const { return pow2_ && bits_ < 64 ? (u64{1} << bits_) - 1 : ~u64{0}; }

  std::string to_string() const;
  static Alphabet parse(const std::string& s);

  bool operator==(const Alphabet&) const = default;

 private:
  bool pow2_ = true;
  unsigned bits_ = 1;
  u64 size_ = 2;
};

}  // namespace fprg
