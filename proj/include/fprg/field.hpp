// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fprg/common.hpp"

namespace fprg {

// x^degree + sum_{e in taps} x^e over GF(2); taps are strictly below degree and include 0.
struct Gf2Modulus {
  unsigned degree = 0;
  std::vector<unsigned> taps;
  bool operator==(const Gf2Modulus&) const = default;
};

// Built-in modulus for 1 <= t <= 64: the first irreducible trinomial, else pentanomial,
// in lexicographic order of the tap exponents.
Gf2Modulus builtin_modulus(unsigned t);
// Same search order as the built-in table, run for any degree.
Gf2Modulus search_irreducible(unsigned degree);
bool is_irreducible(const Gf2Modulus& f);
// Built-in for t <= 64, otherwise searched once and cached.
const Gf2Modulus& modulus_for(unsigned degree);

// Carry-less product of two 64-bit polynomials.
u128 clmul64(u64 a, u64 b);

bool is_prime_u64(u64 n);
u64 next_prime(u64 lo);

// GF(2^t) with t <= 64, or GF(p) with p < 2^62. Elements are integers in [0, q).
class Field {
 public:
  enum class Kind { binary, prime };

  Field() = default;
  static Field binary(unsigned t);
  static Field prime(u64 p);

  Kind kind() const { return kind_; }
  bool is_binary() const { return kind_ == Kind::binary; }
  unsigned degree() const { return t_; }
  u64 characteristic() const { return kind_ == Kind::binary ? 2 : p_; }
  // bits of an encoded element: t, or ceil(log2 p)
  unsigned bits() const { return kind_ == Kind::binary ? t_ : ceil_log2(p_); }
  u128 order() const { return kind_ == Kind::binary ? (u128{1} << t_) : u128{p_}; }
  bool contains(u64 v) const { return u128{v} < order(); }

  u64 add(u64 a, u64 b) const {
    if (kind_ == Kind::binary) return a ^ b;
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const {
    if (kind_ == Kind::binary) return a ^ b;
    return a >= b ? a - b : a + p_ - b;
  }
  u64 mul(u64 a, u64 b) const;
  u64 pow(u64 a, u64 e) const;
  // Multiplicative inverse; throws UsageError on zero.
  u64 inv(u64 a) const;
  // Map bits() raw seed bits to an element (reduced mod p for prime fields).
  u64 decode(u64 raw) const { return kind_ == Kind::binary ? raw : raw % p_; }

  // Low part of the modulus (x^t = low) for binary fields.
  u64 modulus_low() const { return low_; }
  std::string describe() const;

  bool operator==(const Field& o) const { return kind_ == o.kind_ && t_ == o.t_ && p_ == o.p_ && low_ == o.low_; }

 private:
  Kind kind_ = Kind::binary;
  unsigned t_ = 1;
  u64 p_ = 2;
  u64 low_ = 1;
};

struct FieldElem {
  u64 value = 0;
  Field field;
};

FieldElem make_elem(const Field& f, u64 value);
FieldElem field_add(const FieldElem& a, const FieldElem& b);
// Product under the field's modulus; mismatched fields are a usage error.
FieldElem field_mul(const FieldElem& a, const FieldElem& b);

// GF(2^d) for any d >= 1, elements as little-endian 64-bit words.
class WideField {
 public:
  explicit WideField(unsigned degree);
  unsigned degree() const { return d_; }
  std::size_t words() const { return w_; }
  // out may alias neither input.
  void mul(const u64* a, const u64* b, u64* out) const;
  const Gf2Modulus& modulus() const { return *mod_; }

 private:
  unsigned d_;
  std::size_t w_;
  const Gf2Modulus* mod_;
};

}  // namespace fprg
