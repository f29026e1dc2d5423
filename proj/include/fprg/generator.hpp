// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fprg/bits.hpp"
#include "fprg/common.hpp"
#include "fprg/families.hpp"
#include "json.hpp"

namespace fprg {

using json = nlohmann::json;

class Generator;
using GenPtr = std::shared_ptr<const Generator>;

// A map {0,1}^r -> [m]^n given as a plan tree. Every node consumes its local seed bits
// first, then its children's seeds in order.
class Generator {
 public:
  Generator(Alphabet m, std::size_t n) : m_(m), n_(n) {}
  virtual ~Generator() = default;

  const Alphabet& alphabet() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t seed_bits() const;
  virtual std::size_t local_bits() const = 0;
  virtual std::vector<GenPtr> children() const { return {}; }
  virtual std::string kind() const = 0;

  // Reads exactly seed_bits() bits.
  virtual void fill(BitReader& in, std::span<Symbol> out) const = 0;
  std::vector<Symbol> generate(const BitString& seed) const;
  void generate_into(const BitString& seed, std::span<Symbol> out) const;

  // Target error recorded by the planner (0 when not planned for one).
  double eps() const { return eps_; }
  void set_eps(double e) { eps_ = e; }

  // kind, m, n, seed_bits, local_bits, eps, params, children.
  json to_json() const;
  virtual json params() const { return json::object(); }

 protected:
  // Throws RefusalError when symbols do not fit 64 bits.
  void require_materializable() const;

 private:
  Alphabet m_;
  std::size_t n_;
  double eps_ = 0;
};

// Seed read as n chunks of ceil(log2 m) bits; chunk i is symbol i (mod m). Exactly uniform
// when m is a power of two.
class UniformStub final : public Generator {
 public:
  UniformStub(Alphabet m, std::size_t n) : Generator(m, n) {}
  std::size_t local_bits() const override { return n() * alphabet().bits(); }
  std::string kind() const override { return "uniform-stub"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
};

// Constant output, no seed.
class ConstStub final : public Generator {
 public:
  ConstStub(Alphabet m, std::size_t n, Symbol value = 0);
  std::size_t local_bits() const override { return 0; }
  std::string kind() const override { return "const-stub"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override { return {{"value", value_}}; }

 private:
  Symbol value_;
};

class KWiseGen final : public Generator {
 public:
  KWiseGen(Alphabet m, std::size_t n, unsigned k, double delta_map = 1e-3);
  std::size_t local_bits() const override { return fam_.seed_bits(); }
  std::string kind() const override { return "kwise"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;
  const KWiseFamily& family() const { return fam_; }

 private:
  KWiseFamily fam_;
  double delta_map_;
};

// Symbols from chunks of a delta-biased bit string: b bits per symbol for m = 2^b; other m
// use ceil(log2 m) + ceil(log2(n / delta_map)) bits reduced mod m.
class SmallBiasLift final : public Generator {
 public:
  SmallBiasLift(Alphabet m, std::size_t n, double delta, double delta_map = 1e-3);
  std::size_t local_bits() const override { return fam_.seed_bits(); }
  std::string kind() const override { return "small-bias-lift"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;

 private:
  SmallBiasFamily fam_;
  unsigned chunk_;
  double delta_, delta_map_;
};

// (a + b) mod m coordinatewise; a's seed first.
class XorCompose final : public Generator {
 public:
  XorCompose(GenPtr a, GenPtr b);
  std::size_t local_bits() const override { return 0; }
  std::vector<GenPtr> children() const override { return {a_, b_}; }
  std::string kind() const override { return "xor-compose"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;

 private:
  GenPtr a_, b_;
};

// Chunk-of-bits symbol mapping shared by several nodes.
Symbol symbol_from_bits(u64 bits, const Alphabet& m);
// Bits per symbol when a symbol is drawn from raw bits with mapping budget delta_map per n symbols.
unsigned symbol_bits(const Alphabet& m, std::size_t n, double delta_map);

// Sum over the plan tree of local_bits, read back from serialized JSON.
std::size_t seed_bits_from_json(const json& plan);

}  // namespace fprg
