// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fprg/compose.hpp"
#include "fprg/harness.hpp"
#include "fprg/metrics.hpp"
#include "fprg/rng.hpp"

namespace fprg {

// 1[<w, x> - theta >= 0]
struct Halfspace {
  std::vector<long long> w;
  long long theta = 0;

  bool eval(std::span<const Symbol> x) const;
  json to_json() const;
  static Halfspace from_json(const json& j);
};

// Integer form of a generalized halfspace: 1[sum_j G[j][x_j] >= Theta].
struct IntegerTables {
  std::vector<std::vector<long long>> G;
  long long theta = 0;
  bool eval(std::span<const Symbol> x) const;
};

// 1[sum_j g[j][x_j] >= theta] over [m]^n, m = g[j].size().
struct GeneralizedHalfspace {
  std::vector<std::vector<double>> g;
  double theta = 0;

  static GeneralizedHalfspace from(const Halfspace& h);
  u64 m() const { return g.empty() ? 0 : g[0].size(); }
  bool eval(std::span<const Symbol> x) const;
  // Equivalent integer tables whose sum window fits window_cap. Tables are shifted to
  // minimum 0 and scaled by 2^k: exactly when every entry becomes an integer, otherwise by
  // rounding, accepted only when no reachable sum comes within n/2 of the scaled
  // threshold (so every sign is preserved). RefusalError if neither fits the window.
  IntegerTables canonical(std::size_t window_cap = kDefaultWindowCap) const;
  // The same test over {0,1}^{mn} on one-hot encodings: weight G[j][a] on bit j*m + a.
  Halfspace embed_binary(std::size_t window_cap = kDefaultWindowCap) const;
  json to_json() const;
  static GeneralizedHalfspace from_json(const json& j);
};

std::vector<Symbol> one_hot(std::span<const Symbol> x, u64 m);

// 1[sum_i a_i x_i mod M in S]
struct ModularTest {
  std::vector<long long> a;
  u64 M = 2;
  std::vector<u64> S;

  u64 residue(std::span<const Symbol> x) const;
  bool eval(std::span<const Symbol> x) const;
  json to_json() const;
  static ModularTest from_json(const json& j);
};

// h(sum_j g[j][x_j]) with g[j]: [m] -> {0,1}, h: {0..n} -> {0,1}
struct CombinatorialShape {
  std::vector<std::vector<std::uint8_t>> g;
  std::vector<std::uint8_t> h;

  u64 m() const { return g.empty() ? 0 : g[0].size(); }
  bool eval(std::span<const Symbol> x) const;
  json to_json() const;
  static CombinatorialShape from_json(const json& j);
};

// Generator-side value, exact uniform-side value, and their gap.
struct AppError {
  double error = 0;
  double generator = 0, uniform = 0;
  double std_err = 0;  // of the generator side; 0 when exact
  bool exact = true;
  u64 seeds = 0;
  json to_json() const;
};

// Exact pmf of sum_j G[j][x_j] over the output multiset (empirical when sampled).
IntPMF output_sum_pmf(const OutputSample& o, const std::vector<std::vector<long long>>& G);

AppError halfspace_error(const OutputSample& o, const Halfspace& h, std::size_t window_cap = kDefaultWindowCap);
AppError halfspace_error(const Generator& g, const Halfspace& h, const EvalMode& mode, std::size_t window_cap = kDefaultWindowCap);
AppError gen_halfspace_error(const OutputSample& o, const GeneralizedHalfspace& gh, std::size_t window_cap = kDefaultWindowCap);
AppError gen_halfspace_error(const Generator& g, const GeneralizedHalfspace& gh, const EvalMode& mode,
                             std::size_t window_cap = kDefaultWindowCap);
// Total variation between the laws of sum a_i x_i mod M; generator/uniform fields hold
// Pr[in S]. std_err is a half-sum of per-residue standard errors when sampled.
AppError modular_error(const OutputSample& o, const ModularTest& t);
AppError modular_error(const Generator& g, const ModularTest& t, const EvalMode& mode);
AppError comb_shape_error(const OutputSample& o, const CombinatorialShape& c);
AppError comb_shape_error(const Generator& g, const CombinatorialShape& c, const EvalMode& mode);

// Largest-remainder rounding of p to multiples of 2^-bits (counts sum to 2^bits).
std::vector<u64> quantize(std::span<const double> p, unsigned bits);

// Samples from a product distribution on [m]^n through a generator over [2^r_x]^n and
// per-coordinate inverse-CDF tables of the r_x-bit quantized laws.
class ChernoffSampler {
 public:
  // r_x = ceil(log2(m n / eps))
  static unsigned default_bits(u64 m, std::size_t n, double eps);
  ChernoffSampler(std::vector<std::vector<double>> pmfs, unsigned r_x, GenPtr gen, double eps);
  // Generator built by the planner over [2^r_x]^n at error eps.
  static ChernoffSampler build(std::vector<std::vector<double>> pmfs, double eps, const ComposeKnobs& knobs = {},
                               std::optional<unsigned> r_x = std::nullopt);

  std::size_t n() const { return pmfs_.size(); }
  u64 m() const { return pmfs_.empty() ? 0 : pmfs_[0].size(); }
  unsigned bits() const { return r_x_; }
  double eps() const { return eps_; }
  const Generator& generator() const { return *gen_; }
  std::size_t seed_bits() const { return gen_->seed_bits(); }
  // Quantized law of coordinate i (what the output follows when generator marginals are uniform).
  std::vector<double> quantized(std::size_t i) const;
  Symbol map(std::size_t i, Symbol z) const;
  std::vector<Symbol> sample(const BitString& seed) const;
  json to_json() const;

 private:
  std::vector<std::vector<double>> pmfs_;
  unsigned r_x_;
  GenPtr gen_;
  double eps_;
  std::vector<std::vector<u64>> counts_;   // quantized counts per coordinate
  std::vector<std::vector<u64>> cum_;      // cumulative counts, for the inverse CDF
};

struct TailReport {
  double tail = 0, bound = 0, std_err = 0;
  u64 trials = 0;
  bool pass = true;
  json to_json() const;
};

// Empirical Pr[|sum g_i(Y_i) - sum E g_i(Y_i)| >= t] over random seeds against
// 2 exp(-t^2 / 2n) + eps; pass iff tail <= bound + 3 standard errors (t <= 0 is vacuous).
TailReport chernoff_tail_check(const ChernoffSampler& s, const std::vector<std::vector<double>>& g, double t, u64 trials,
                               u64 rng_seed = 1);

// Random instances for campaigns and tests.
Halfspace random_halfspace(Rng& rng, std::size_t n, long long max_weight);
GeneralizedHalfspace random_gen_halfspace(Rng& rng, u64 m, std::size_t n, long long max_weight);
ModularTest random_modular(Rng& rng, std::size_t n, u64 M);
CombinatorialShape random_comb_shape(Rng& rng, u64 m, std::size_t n);

}  // namespace fprg
