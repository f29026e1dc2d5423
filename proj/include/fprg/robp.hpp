// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fprg/bits.hpp"
#include "fprg/field.hpp"
#include "fprg/shapes.hpp"

namespace fprg {

// Layered read-once branching program. Layer t has width[t] states, the start state is
// state 0 of layer 0, and step t reads one D-bit block. Final states carry labels in the
// unit disk.
struct ROBP {
  unsigned D = 0;
  std::vector<std::size_t> width{1};
  // next[t][s * 2^D + block] = state in layer t+1
  std::vector<std::vector<std::uint32_t>> next;
  std::vector<cplx> labels;

  std::size_t T() const { return next.size(); }
  // state bits: ceil(log2 max width)
  unsigned S() const;
  void validate() const;

  json to_json() const;
  static ROBP from_json(const json& j);
};

cplx robp_eval(const ROBP& p, std::span<const u64> blocks);
// Exact expectation under uniform blocks, by pushing the state distribution forward.
cplx robp_uniform_expectation(const ROBP& p);
// Every layer has the full 2^S states with uniformly random transitions; labels uniform in the disk.
ROBP random_robp(Rng& rng, unsigned S, unsigned D, std::size_t T);

// Per-level hash of the recycling generator.
enum class InwHash {
  affine,    // x -> a x + b over GF(2^D'), (a, b) uniform
  identity,  // x -> x; test stub, still consumes the hash seed
};

// INW-style recycling generator: T blocks of D bits from
//   D' + 2 D' log2(T) seed bits,
// with D' = max(D, ceil(log2(L / delta))) + extra, rounded up to a multiple of 64 past 64,
// L = log2 T (T padded to a power of two). Seed layout: x, then (a_l, b_l) for l = 1..L.
// Block j applies h_l for every set bit (l-1) of j, highest level first; a block is the top D
// bits of its D'-bit value.
class INWGenerator {
 public:
  INWGenerator() = default;
  INWGenerator(unsigned D, std::size_t T, double delta, InwHash hash = InwHash::affine, unsigned extra_bits = 0);

  unsigned D() const { return D_; }
  std::size_t T() const { return T_; }
  std::size_t T_padded() const { return std::size_t{1} << L_; }
  unsigned levels() const { return L_; }
  unsigned block_bits() const { return Dp_; }
  double delta() const { return delta_; }
  InwHash hash() const { return hash_; }
  unsigned extra_bits() const { return extra_; }
  std::size_t seed_bits() const { return Dp_ * (1 + 2 * std::size_t{L_}); }

  // Blocks as little-endian word vectors of block_bits() bits, all T_padded of them.
  void expand_words(BitReader& in, std::vector<u64>& out) const;
  // First T blocks as D-bit strings.
  std::vector<BitString> expand(BitReader& in) const;
  // D <= 64 only: first T blocks as integers.
  void expand_small(BitReader& in, std::span<u64> blocks) const;

  json to_json() const;

 private:
  void apply(const u64* a, const u64* b, const u64* x, u64* out) const;

  unsigned D_ = 0;
  std::size_t T_ = 1;
  unsigned L_ = 0;
  unsigned Dp_ = 0;
  std::size_t W_ = 1;
  double delta_ = 0;
  unsigned extra_ = 0;
  InwHash hash_ = InwHash::affine;
  std::optional<Field> small_;
  std::optional<WideField> wide_;
};

std::vector<BitString> inw_expand(const INWGenerator& g, const BitString& seed);

// 2 ceil(log2(n / delta)): the fixed-point precision that keeps every product within delta.
unsigned default_precision(std::size_t n, double delta);

// Tracks (phase, -log2 magnitude) of the running product in units of 2^-P, with an absorbing
// zero state once the magnitude drops below 2^-P. Requires m = 2^D; one symbol per step.
// Pointwise error <= (pi + 0.35) n 2^-P.
ROBP shape_to_robp(const FourierShape& f, unsigned precision_bits);
// Each table entry rounded the same way shape_to_robp rounds a step.
FourierShape discretize_shape(const FourierShape& f, unsigned precision_bits);

}  // namespace fprg
