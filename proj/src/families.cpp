// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/families.hpp"

#include <cmath>

namespace fprg {

namespace {

unsigned bits_for_ratio(double x) {
  if (!(x > 1)) return 0;
  return static_cast<unsigned>(std::ceil(std::log2(x) - 1e-12));
}

u64 checked_ceil(double x, const char* what) {
  if (!(x < 4.0e18)) throw RefusalError(std::string(what) + " exceeds 62 bits");
  return static_cast<u64>(std::ceil(x));
}

}  // namespace

// ---- KWiseFamily ----

KWiseFamily::KWiseFamily(std::size_t n, Alphabet m, unsigned k, double delta_map) : n_(n), m_(m) {
  if (k == 0 && n > 0) throw UsageError("k-wise family needs k >= 1");
  k_ = static_cast<unsigned>(std::min<std::size_t>(k, n));
  if (m.is_pow2()) {
    if (m.bits() == 0) {  // [1]: nothing to sample
      coeff_bits_ = 0;
      field_ = Field::binary(1);
      return;
    }
    unsigned s = std::max({m.bits(), ceil_log2(n), 1u});
    coeff_bits_ = s;
    if (s <= 64) field_ = Field::binary(s);
    return;
  }
  if (!(delta_map > 0 && delta_map < 1)) throw UsageError("delta_map must be in (0,1)");
  double lo = static_cast<double>(m.size()) * std::ceil(4.0 * static_cast<double>(std::max<std::size_t>(n, 1)) / delta_map);
  u64 q = next_prime(std::max<u64>(n, checked_ceil(lo, "k-wise prime field")));
  field_ = Field::prime(q);
  exact_ = false;
  coeff_bits_ = ceil_log2(q) + bits_for_ratio(4.0 * std::max(k_, 1u) / delta_map);
  if (coeff_bits_ > 127) throw RefusalError("k-wise coefficients wider than 127 bits");
}

KWiseFamily KWiseFamily::over_field(std::size_t n, const Field& f, unsigned k, double delta_map) {
  if (u128{n} > f.order()) throw UsageError("n = " + std::to_string(n) + " exceeds the " + f.describe() + " evaluation points");
  if (k == 0 && n > 0) throw UsageError("k-wise family needs k >= 1");
  KWiseFamily fam;
  fam.n_ = n;
  fam.k_ = static_cast<unsigned>(std::min<std::size_t>(k, n));
  fam.field_ = f;
  if (f.is_binary()) {
    fam.m_ = Alphabet::pow2(f.degree());
    fam.coeff_bits_ = f.degree();
    fam.exact_ = true;
  } else {
    fam.m_ = Alphabet::of(f.characteristic());
    fam.coeff_bits_ = f.bits() + bits_for_ratio(4.0 * std::max(fam.k_, 1u) / delta_map);
    fam.exact_ = false;
  }
  return fam;
}

const Field& KWiseFamily::field() const {
  if (!field_) throw RefusalError("k-wise family over 2^" + std::to_string(coeff_bits_) + " is plan-only");
  return *field_;
}

void KWiseFamily::decode(BitReader& in, u64* coeffs) const {
  const Field& f = field();
  for (unsigned j = 0; j < k_; ++j) {
    if (coeff_bits_ == 0) {
      coeffs[j] = 0;
    } else if (f.is_binary()) {
      coeffs[j] = in.take(coeff_bits_);
    } else if (coeff_bits_ <= 64) {
      coeffs[j] = in.take(coeff_bits_) % f.characteristic();
    } else {
      u128 hi = in.take(coeff_bits_ - 64);
      u128 raw = (hi << 64) | in.take(64);
      coeffs[j] = static_cast<u64>(raw % f.characteristic());
    }
  }
}

u64 KWiseFamily::eval_field(const u64* coeffs, std::size_t i) const {
  if (k_ == 0) return 0;
  const Field& f = *field_;
  u64 r = coeffs[k_ - 1];
  for (unsigned j = k_ - 1; j-- > 0;) r = f.add(f.mul(r, i), coeffs[j]);
  return r;
}

Symbol KWiseFamily::eval(const u64* coeffs, std::size_t i) const {
  u64 v = eval_field(coeffs, i);
  return m_.is_pow2() ? (v & m_.mask()) : v % m_.size();
}

void KWiseFamily::fill(BitReader& in, std::span<Symbol> out) const {
  std::vector<u64> c(k_ ? k_ : 1);
  decode(in, c.data());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval(c.data(), i);
}

std::vector<Symbol> KWiseFamily::sample(const BitString& seed) const {
  if (seed.size() != seed_bits()) throw UsageError("k-wise seed must have " + std::to_string(seed_bits()) + " bits");
  std::vector<Symbol> out(n_);
  BitReader in(seed);
  fill(in, out);
  return out;
}

json KWiseFamily::to_json() const {
  return json{{"kind", "kwise"},
              {"n", n_},
              {"m", m_.to_string()},
              {"k", k_},
              {"field", field_ ? field_->describe() : "GF(2^" + std::to_string(coeff_bits_) + ")"},
              {"coeff_bits", coeff_bits_},
              {"exact", exact_},
              {"seed_bits", seed_bits()}};
}

// ---- SmallBiasFamily ----

SmallBiasFamily::SmallBiasFamily(std::size_t n, double delta) : n_(n), delta_(delta) {
  if (!(delta > 0 && delta <= 1)) throw UsageError("small-bias delta must be in (0,1]");
  t_ = bits_for_ratio(static_cast<double>(std::max<std::size_t>(n, 1)) / delta) + 1;
  if (t_ > 64) throw RefusalError("small-bias field GF(2^" + std::to_string(t_) + ") exceeds 64 bits");
  field_ = Field::binary(t_);
}

double SmallBiasFamily::bias_bound() const { return static_cast<double>(n_ ? n_ - 1 : 0) / std::ldexp(1.0, static_cast<int>(t_)); }

void SmallBiasFamily::fill(BitReader& in, std::span<std::uint8_t> out) const {
  const Field& f = *field_;
  u64 x = in.take(t_), y = in.take(t_);
  u64 p = 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(f.mul(p, y) & 1);
    p = f.mul(p, x);
  }
}

std::vector<std::uint8_t> SmallBiasFamily::sample(const BitString& seed) const {
  if (seed.size() != seed_bits()) throw UsageError("small-bias seed must have " + std::to_string(seed_bits()) + " bits");
  std::vector<std::uint8_t> out(n_);
  BitReader in(seed);
  fill(in, out);
  return out;
}

json SmallBiasFamily::to_json() const {
  return json{{"kind", "small-bias"}, {"n", n_}, {"delta", delta_}, {"t", t_}, {"seed_bits", seed_bits()}};
}

// ---- CombinedHashFamily ----

CombinedHashFamily::CombinedHashFamily(std::size_t n, u64 t, unsigned k, double delta, double delta_map)
    : n_(n), t_(t), delta_(delta) {
  if (t == 0) throw UsageError("hash range must be positive");
  if (delta < 0) throw UsageError("hash bias must be non-negative");
  Alphabet range = Alphabet::of(t);
  kwise_ = KWiseFamily(n, range, k, delta_map);
  if (delta > 0 && t > 1) {
    chunk_bits_ = range.bits();
    if (!range.is_pow2()) chunk_bits_ += bits_for_ratio(4.0 * static_cast<double>(std::max<std::size_t>(n, 1)) / delta_map);
    biased_ = SmallBiasFamily(n * chunk_bits_, delta);
  }
}

void CombinedHashFamily::fill(BitReader& in, std::span<u64> table) const {
  std::vector<Symbol> a(n_);
  kwise_.fill(in, a);
  for (std::size_t i = 0; i < n_; ++i) table[i] = a[i];
  if (!biased_) return;
  std::vector<std::uint8_t> bits(biased_->n());
  biased_->fill(in, bits);
  for (std::size_t i = 0; i < n_; ++i) {
    u64 c = 0;
    for (unsigned b = 0; b < chunk_bits_; ++b) c = (c << 1) | bits[i * chunk_bits_ + b];
    table[i] = static_cast<u64>((u128{table[i]} + c % t_) % t_);
  }
}

std::vector<u64> CombinedHashFamily::sample(const BitString& seed) const {
  if (seed.size() != seed_bits()) throw UsageError("hash seed must have " + std::to_string(seed_bits()) + " bits");
  std::vector<u64> out(n_);
  BitReader in(seed);
  fill(in, out);
  return out;
}

json CombinedHashFamily::to_json() const {
  json j{{"kind", "hash"}, {"n", n_}, {"t", t_}, {"k", k()}, {"delta", delta_}, {"kwise", kwise_.to_json()}};
  if (biased_) j["small_bias"] = biased_->to_json();
  j["seed_bits"] = seed_bits();
  return j;
}

// ---- permutations ----

PairwisePermutation::PairwisePermutation(unsigned t, u64 a, u64 b) : t_(t), a_(a), b_(b) {
  if (t > 64) throw RefusalError("permutation domain wider than 2^64");
  if (t == 0) {
    a_ = 1;
    b_ = 0;
    return;
  }
  f_ = Field::binary(t);
  if (a == 0 || !f_.contains(a) || !f_.contains(b)) throw UsageError("invalid permutation parameters");
  a_inv_ = f_.inv(a);
}

PairwisePermutation perm_sample(unsigned t, BitReader& in) {
  if (t == 0) return PairwisePermutation(0, 1, 0);
  u64 v = in.take(t);
  u64 full = t == 64 ? ~u64{0} : (u64{1} << t) - 1;
  u64 a = v % full + 1;
  u64 b = in.take(t);
  return PairwisePermutation(t, a, b);
}

PairwisePermutation perm_sample(unsigned t, const BitString& seed) {
  if (seed.size() != perm_seed_bits(t)) throw UsageError("permutation seed must have 2t bits");
  BitReader in(seed);
  return perm_sample(t, in);
}

PairwisePermutation perm_from_index(unsigned t, u64 a, u64 b) { return PairwisePermutation(t, a, b); }

std::vector<Symbol> kwise_sample(const KWiseFamily& fam, const BitString& seed) { return fam.sample(seed); }
std::vector<std::uint8_t> small_bias_sample(const SmallBiasFamily& fam, const BitString& seed) { return fam.sample(seed); }
std::vector<u64> hash_sample(const CombinedHashFamily& fam, const BitString& seed) { return fam.sample(seed); }

double hash_load(std::span<const double> v, std::span<const u64> h, u64 t) {
  if (v.size() != h.size()) throw UsageError("hash_load: vector and table lengths differ");
  std::vector<double> mass(t, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (h[i] >= t) throw UsageError("hash value out of range");
    mass[h[i]] += v[i] * v[i];
  }
  double s = 0;
  for (double x : mass) s += x * x;
  return s;
}

}  // namespace fprg
