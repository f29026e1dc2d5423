// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fprg/generator.hpp"
#include "fprg/highvar.hpp"
#include "fprg/reduce.hpp"
#include "fprg/robp.hpp"

namespace fprg {

// Unspecified constants of the construction, all recorded in plan JSON.
struct ComposeKnobs {
  std::size_t n0 = 64;        // base case: n <= n0
  double tau_hv = 4096;       // the high-variance generator joins a level iff n >= tau_hv
  double c_T = 0.125;         // spreading buckets T = max(16, ceil(c_T ln^5(1/delta)))
  double C = 4;               // constant in the k of alphabet and dimension steps
  unsigned p = 8;             // bucket independence inside G1
  double delta_rec = 0.05;    // G1 recycling error
  double delta_map = 0;       // non-power-of-two mapping budget; 0 means eps / 10
  unsigned inw_extra = 0;     // extra INW block bits in the base case
  unsigned precision_cap = 62;  // refuse base cases needing more phase bits

  json to_json() const;
  static ComposeKnobs from_json(const json& j);
  // key=value from a config file or flag; throws UsageError on unknown keys.
  void set(const std::string& key, const std::string& value);
};

// Base case: INW over T blocks of c = ceil(n/T) symbols each (D = c * bits per symbol).
// T ranges over powers of two >= 2 whose blocks keep at least ceil(log2(1/delta)) bits
// (T = 2 when none does); the one with the fewest seed bits wins. Shapes are read as
// width 2^S programs, S = 2 ceil(log2(n0/delta)) phase bits.
class InwBase final : public Generator {
 public:
  InwBase(Alphabet m, std::size_t n, double delta, std::size_t n0 = 64, unsigned extra_bits = 0, double delta_map = 1e-3,
          unsigned precision_cap = 62);

  std::size_t local_bits() const override { return inw_.seed_bits(); }
  std::string kind() const override { return "inw-base"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;

  unsigned symbol_bits() const { return b_; }
  std::size_t per_block() const { return c_; }
  unsigned state_bits() const { return S_; }
  double delta() const { return delta_; }
  const INWGenerator& inw() const { return inw_; }

 private:
  double delta_, delta_map_;
  unsigned b_ = 1, S_ = 0;
  std::size_t c_ = 1, n0_;
  INWGenerator inw_;
};

// delta = eps / (4 max(1, ceil(log2 log2 n)))
double level_delta(std::size_t n, double eps);

struct Plan {
  Alphabet m;
  std::size_t n = 0;
  double eps = 0;
  ComposeKnobs knobs;
  GenPtr root;

  std::size_t seed_bits() const { return root->seed_bits(); }
  // {"format", "build": {m, n, eps, knobs}, "seed_bits", "plan": tree}
  json to_json() const;
};

// Top level: alphabet chain down to n^4, then per level G_l (xor) dim step over an
// alphabet-reduced inner generator, recursing until n <= n0. n <= n0 from the start gives a
// single inw-base node with the whole eps.
Plan build_plan(Alphabet m, std::size_t n, double eps, const ComposeKnobs& knobs = {});
GenPtr build_generator(Alphabet m, std::size_t n, double eps, const ComposeKnobs& knobs = {});

// Rebuilds a plan document; built plans are rebuilt from their "build" record and checked
// against the stored tree. Bare trees of stub, kwise, small-bias-lift, xor-compose and
// inw-base nodes are rebuilt node by node.
Plan plan_from_json(const json& doc);
GenPtr generator_from_json(const json& tree);

// Total seed bits: g.seed_bits(), or the sum of local_bits over a serialized tree.
std::size_t seed_length(const Generator& g);
std::size_t seed_length(const json& tree);

// Number of levels with n > n0 on the way n -> ceil(sqrt n).
std::size_t recursion_depth(std::size_t n, std::size_t n0);

}  // namespace fprg
