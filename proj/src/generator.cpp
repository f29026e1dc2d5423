// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/generator.hpp"

#include <cmath>

namespace fprg {

std::size_t Generator::seed_bits() const {
  std::size_t r = local_bits();
  for (const GenPtr& c : children()) r += c->seed_bits();
  return r;
}

std::vector<Symbol> Generator::generate(const BitString& seed) const {
  std::vector<Symbol> out(n_);
  generate_into(seed, out);
  return out;
}

void Generator::generate_into(const BitString& seed, std::span<Symbol> out) const {
  if (seed.size() != seed_bits())
    throw UsageError(kind() + " seed must have " + std::to_string(seed_bits()) + " bits, got " + std::to_string(seed.size()));
  if (out.size() != n_) throw UsageError("output buffer must hold n symbols");
  BitReader in(seed);
  fill(in, out);
}

json Generator::to_json() const {
  json j{{"kind", kind()}, {"m", m_.to_string()}, {"n", n_}, {"seed_bits", seed_bits()}, {"local_bits", local_bits()}};
  if (eps_ > 0) j["eps"] = eps_;
  json p = params();
  if (!p.empty()) j["params"] = std::move(p);
  auto ch = children();
  if (!ch.empty()) {
    json arr = json::array();
    for (const GenPtr& c : ch) arr.push_back(c->to_json());
    j["children"] = std::move(arr);
  }
  return j;
}

void Generator::require_materializable() const {
  if (!m_.materializable()) throw RefusalError(kind() + " over [" + m_.to_string() + "] is plan-only: symbols exceed 63 bits");
}

Symbol symbol_from_bits(u64 bits, const Alphabet& m) { return m.is_pow2() ? bits & m.mask() : bits % m.size(); }

unsigned symbol_bits(const Alphabet& m, std::size_t n, double delta_map) {
  if (m.is_pow2()) return m.bits();
  if (!(delta_map > 0 && delta_map < 1)) throw UsageError("delta_map must be in (0,1)");
  return m.bits() + static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 1)) / delta_map) - 1e-12));
}

// ---- stubs ----

void UniformStub::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  unsigned b = alphabet().bits();
  for (Symbol& s : out) s = symbol_from_bits(in.take(b), alphabet());
}

ConstStub::ConstStub(Alphabet m, std::size_t n, Symbol value) : Generator(m, n), value_(value) {
  if (m.materializable() && value >= m.size()) throw UsageError("constant symbol out of range");
}

void ConstStub::fill(BitReader&, std::span<Symbol> out) const {
  for (Symbol& s : out) s = value_;
}

// ---- k-wise ----

KWiseGen::KWiseGen(Alphabet m, std::size_t n, unsigned k, double delta_map) : Generator(m, n), fam_(n, m, k, delta_map), delta_map_(delta_map) {}

void KWiseGen::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  fam_.fill(in, out);
}

json KWiseGen::params() const {
  return {{"k", fam_.k()}, {"delta_map", delta_map_}, {"field", fam_.to_json()["field"]}, {"exact", fam_.exact()}};
}

// ---- small-bias lift ----

SmallBiasLift::SmallBiasLift(Alphabet m, std::size_t n, double delta, double delta_map)
    : Generator(m, n), chunk_(symbol_bits(m, n, delta_map)), delta_(delta), delta_map_(delta_map) {
  if (chunk_ > 64) throw RefusalError("small-bias lift needs symbols of at most 64 bits");
  fam_ = SmallBiasFamily(n * chunk_, delta);
}

void SmallBiasLift::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  std::vector<std::uint8_t> bits(fam_.n());
  fam_.fill(in, bits);
  for (std::size_t i = 0; i < out.size(); ++i) {
    u64 v = 0;
    for (unsigned b = 0; b < chunk_; ++b) v = (v << 1) | bits[i * chunk_ + b];
    out[i] = symbol_from_bits(v, alphabet());
  }
}

json SmallBiasLift::params() const { return {{"delta", delta_}, {"delta_map", delta_map_}, {"chunk_bits", chunk_}, {"t", fam_.t()}}; }

// ---- xor-compose ----

XorCompose::XorCompose(GenPtr a, GenPtr b) : Generator(a->alphabet(), a->n()), a_(std::move(a)), b_(std::move(b)) {
  if (!(a_->alphabet() == b_->alphabet()) || a_->n() != b_->n()) throw UsageError("xor-compose children must share (m, n)");
}

void XorCompose::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  std::vector<Symbol> other(n());
  a_->fill(in, out);
  b_->fill(in, other);
  const Alphabet& m = alphabet();
  for (std::size_t i = 0; i < n(); ++i)
    out[i] = m.is_pow2() ? (out[i] + other[i]) & m.mask() : static_cast<Symbol>((u128{out[i]} + other[i]) % m.size());
}

std::size_t seed_bits_from_json(const json& plan) {
  std::size_t r = plan.at("local_bits").get<std::size_t>();
  if (plan.contains("children"))
    for (const json& c : plan["children"]) r += seed_bits_from_json(c);
  return r;
}

}  // namespace fprg
