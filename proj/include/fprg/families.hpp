// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fprg/bits.hpp"
#include "fprg/common.hpp"
#include "fprg/field.hpp"
#include "json.hpp"

namespace fprg {

using json = nlohmann::json;

// k-wise independent vectors in [m]^n: a random polynomial of degree < k over GF(q),
// evaluated at the first n field elements and reduced mod m.
//
// Power-of-two m uses GF(2^s), 2^s >= max(m, n), and keeps the low bits: exact.
// Other m use the smallest prime q >= max(n, m * ceil(4n / delta_map)); coefficients are
// decoded from ceil(log2 q) + ceil(log2(4k / delta_map)) bits. Both deviations together
// stay below delta_map / 2.
class KWiseFamily {
 public:
  KWiseFamily() = default;
  KWiseFamily(std::size_t n, Alphabet m, unsigned k, double delta_map = 1e-3);
  // Values are field elements: m = q. Prime fields decode coefficients with extra bits.
  static KWiseFamily over_field(std::size_t n, const Field& f, unsigned k, double delta_map = 1e-3);

  std::size_t n() const { return n_; }
  unsigned k() const { return k_; }
  const Alphabet& alphabet() const { return m_; }
  std::size_t seed_bits() const { return std::size_t{k_} * coeff_bits_; }
  unsigned coeff_bits() const { return coeff_bits_; }
  // True when outputs are exactly k-wise uniform over [m].
  bool exact() const { return exact_; }
  bool materializable() const { return field_.has_value(); }
  const Field& field() const;

  std::vector<Symbol> sample(const BitString& seed) const;
  // Coefficients c_0..c_{k-1}, consuming seed_bits().
  void decode(BitReader& in, u64* coeffs) const;
  // Field value of the polynomial at the i-th point, and its reduction mod m.
  u64 eval_field(const u64* coeffs, std::size_t i) const;
  Symbol eval(const u64* coeffs, std::size_t i) const;
  void fill(BitReader& in, std::span<Symbol> out) const;

  json to_json() const;

 private:
  std::size_t n_ = 0;
  unsigned k_ = 0;
  Alphabet m_;
  unsigned coeff_bits_ = 0;
  bool exact_ = true;
  std::optional<Field> field_;
};

// delta-biased bits by the powering construction: t = ceil(log2(n/delta)) + 1,
// seed (x, y) in GF(2^t)^2, bit_i = lsb(x^i * y).
class SmallBiasFamily {
 public:
  SmallBiasFamily() = default;
  SmallBiasFamily(std::size_t n, double delta);

  std::size_t n() const { return n_; }
  double delta() const { return delta_; }
  unsigned t() const { return t_; }
  std::size_t seed_bits() const { return 2 * std::size_t{t_}; }
  // Bias guaranteed by the construction, (n-1)/2^t.
  double bias_bound() const;

  std::vector<std::uint8_t> sample(const BitString& seed) const;
  void fill(BitReader& in, std::span<std::uint8_t> out) const;

  json to_json() const;

 private:
  std::size_t n_ = 0;
  double delta_ = 0;
  unsigned t_ = 0;
  std::optional<Field> field_;
};

// Hash [n] -> [t]: a k-wise independent part plus (when delta > 0) a delta-biased part,
// added mod t. delta = 0 gives a plain k-wise family.
class CombinedHashFamily {
 public:
  CombinedHashFamily() = default;
  CombinedHashFamily(std::size_t n, u64 t, unsigned k, double delta, double delta_map = 1e-3);

  std::size_t n() const { return n_; }
  u64 range() const { return t_; }
  unsigned k() const { return kwise_.k(); }
  double delta() const { return delta_; }
  std::size_t seed_bits() const { return kwise_.seed_bits() + (biased_ ? biased_->seed_bits() : 0); }
  const KWiseFamily& kwise() const { return kwise_; }

  std::vector<u64> sample(const BitString& seed) const;
  void fill(BitReader& in, std::span<u64> table) const;

  json to_json() const;

 private:
  std::size_t n_ = 0;
  u64 t_ = 1;
  double delta_ = 0;
  KWiseFamily kwise_;
  std::optional<SmallBiasFamily> biased_;
  unsigned chunk_bits_ = 0;
};

// x -> a*x + b over GF(2^t), a != 0.
class PairwisePermutation {
 public:
  PairwisePermutation() = default;
  PairwisePermutation(unsigned t, u64 a, u64 b);
  unsigned t() const { return t_; }
  u64 a() const { return a_; }
  u64 b() const { return b_; }
  u64 domain() const { return u64{1} << t_; }
  u64 operator()(u64 x) const { return t_ == 0 ? 0 : f_.add(f_.mul(a_, x), b_); }
  u64 inverse(u64 y) const { return t_ == 0 ? 0 : f_.mul(a_inv_, f_.sub(y, b_)); }

 private:
  unsigned t_ = 0;
  u64 a_ = 1, b_ = 0, a_inv_ = 1;
  Field f_;
};

inline std::size_t perm_seed_bits(unsigned t) { return 2 * std::size_t{t}; }
// a = (first t bits mod (2^t - 1)) + 1, b = next t bits.
PairwisePermutation perm_sample(unsigned t, BitReader& in);
PairwisePermutation perm_sample(unsigned t, const BitString& seed);
// Family index -> permutation, for exact enumeration over a in [1, 2^t), b in [0, 2^t).
PairwisePermutation perm_from_index(unsigned t, u64 a, u64 b);

std::vector<Symbol> kwise_sample(const KWiseFamily& fam, const BitString& seed);
std::vector<std::uint8_t> small_bias_sample(const SmallBiasFamily& fam, const BitString& seed);
std::vector<u64> hash_sample(const CombinedHashFamily& fam, const BitString& seed);

// sum_j (sum_{h(i)=j} v_i^2)^2
double hash_load(std::span<const double> v, std::span<const u64> h, u64 t);

}  // namespace fprg
