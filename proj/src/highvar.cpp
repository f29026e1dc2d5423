// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/highvar.hpp"

#include <cmath>

namespace fprg {

std::vector<std::vector<u64>> bucket_split(const PairwisePermutation& pi, u64 n) {
  if (!is_pow2(n) || n < 2) throw UsageError("bucket_split needs a power of two n >= 2");
  if (pi.domain() != n) throw UsageError("permutation domain must equal n");
  std::vector<std::vector<u64>> b(floor_log2(n));
  for (std::size_t j = 0; j < b.size(); ++j)
    for (u64 i = u64{1} << j; i < (u64{2} << j); ++i) b[j].push_back(pi(i));
  return b;
}

// ---- G1 ----

namespace {
// Bucket j of the padded set: [0, 2) for j = 0, [2^j, 2^{j+1}) otherwise.
u64 bucket_start(std::size_t j) { return j == 0 ? 0 : u64{1} << j; }
u64 bucket_size(std::size_t j) { return j == 0 ? 2 : u64{1} << j; }
}  // namespace

G1::G1(Alphabet m, std::size_t n, G1Params params) : Generator(m, n), p_(params) {
  if (n == 0) throw UsageError("g1 needs n >= 1");
  if (p_.p == 0) throw UsageError("g1 bucket independence must be positive");
  t_ = std::max(1u, ceil_log2(n));
  std::size_t D = 1;
  for (std::size_t j = 0; j < t_; ++j) {
    u64 size = bucket_size(j);
    fams_.emplace_back(size, m, static_cast<unsigned>(std::min<u64>(p_.p, size)), p_.delta_map);
    D = std::max(D, fams_.back().seed_bits());
  }
  inw_ = INWGenerator(static_cast<unsigned>(D), t_, p_.delta_rec);
}

G1::Instance G1::instance(BitReader& in) const {
  Instance inst;
  inst.g_ = this;
  inst.pi_ = perm_sample(t_, in);
  std::vector<BitString> blocks = inw_.expand(in);
  inst.coeffs_.resize(fams_.size());
  for (std::size_t j = 0; j < fams_.size(); ++j) {
    BitReader r(blocks[j]);
    inst.coeffs_[j].resize(std::max(1u, fams_[j].k()));
    fams_[j].decode(r, inst.coeffs_[j].data());
  }
  return inst;
}

Symbol G1::Instance::at(std::size_t i) const {
  u64 pos = pi_.inverse(i);
  std::size_t j = pos < 2 ? 0 : floor_log2(pos);
  return g_->fams_[j].eval(coeffs_[j].data(), pos - bucket_start(j));
}

void G1::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  Instance inst = instance(in);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = inst.at(i);
}

json G1::params() const {
  json fam = json::array();
  for (const auto& f : fams_) fam.push_back(f.to_json());
  return {{"p", p_.p}, {"delta_rec", p_.delta_rec}, {"delta_map", p_.delta_map}, {"log_n", t_},
          {"perm_bits", perm_bits()}, {"buckets", fam}, {"recycler", inw_.to_json()}};
}

// ---- spreading ----

SpreadingFamily::SpreadingFamily(std::size_t n, double delta, double c_T, double delta_map) : n_(n), delta_(delta) {
  if (!(delta > 0 && delta < 1)) throw UsageError("spreading failure probability must be in (0,1)");
  if (n == 0) throw UsageError("spreading family needs n >= 1");
  double L = std::log(1 / delta);
  double want = std::ceil(c_T * std::pow(L, 5));
  T_ = std::min<u64>(n, static_cast<u64>(std::max(16.0, std::min(want, 1e15))));
  ell_ = static_cast<unsigned>(std::ceil(2 * L));
  unsigned k = static_cast<unsigned>(std::max(2.0, std::ceil(L / std::max(1.0, std::log(L)))));
  hash_ = CombinedHashFamily(n, T_, k, delta * delta, delta_map);
}

std::size_t SpreadingFamily::heavy_buckets(std::span<const double> v, std::span<const u64> h) const {
  if (v.size() != n_ || h.size() != n_) throw UsageError("spreading check: lengths differ from n");
  std::vector<double> mass(T_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) mass[h[i]] += v[i] * v[i];
  double thr = B() / (2.0 * static_cast<double>(T_));
  std::size_t c = 0;
  for (double x : mass) c += x >= thr;
  return c;
}

json SpreadingFamily::to_json() const {
  return {{"n", n_}, {"T", T_}, {"B", B()}, {"ell", ell_}, {"delta", delta_}, {"hash", hash_.to_json()}};
}

// ---- G_large ----

GLarge::GLarge(Alphabet m, std::size_t n, double delta, GLargeParams params)
    : Generator(m, n), delta_(delta), p_(params), spread_(n, delta, params.c_T, params.delta_map), g1_(m, n, params.g1) {
  inw_ = INWGenerator(static_cast<unsigned>(g1_.seed_bits()), spread_.T(), delta / 4);
}

void GLarge::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  std::vector<u64> h(n());
  spread_.hash().fill(in, h);
  std::vector<BitString> blocks = inw_.expand(in);
  std::vector<G1::Instance> copies;
  copies.reserve(blocks.size());
  for (const BitString& b : blocks) {
    BitReader r(b);
    copies.push_back(g1_.instance(r));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = copies[h[i]].at(i);
}

json GLarge::params() const {
  return {{"delta", delta_}, {"c_T", p_.c_T}, {"delta_map", p_.delta_map}, {"spreading", spread_.to_json()},
          {"g1", g1_.to_json()}, {"recycler", inw_.to_json()}};
}

}  // namespace fprg
