// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "fprg/families.hpp"
#include "fprg/generator.hpp"
#include "fprg/shapes.hpp"

namespace fprg {

// floor(sqrt(m)); for plan-only alphabets 2^b this is 2^floor(b/2).
Alphabet alphabet_sqrt(const Alphabet& m);
// m > n^4, without overflow.
bool exceeds_n4(const Alphabet& m, std::size_t n);

struct AlphabetStepParams {
  double C = 4;              // k = max(2, ceil(C ln(1/delta) / ln m))
  double delta_map = 1e-3;
  bool force = false;        // allow m <= n^4 (tests)
};

// One alphabet halving: X in [m]^{D x n} has pairwise independent columns whose seeds are
// k-wise across columns; Y = inner(z) in [D]^n; Z_j = X[Y_j, j]. D = floor(sqrt m).
// Seed: the cross-column family, then the inner generator.
class AlphabetStep final : public Generator {
 public:
  AlphabetStep(Alphabet m, std::size_t n, double delta, GenPtr inner, AlphabetStepParams params = {});

  std::size_t local_bits() const override;
  std::vector<GenPtr> children() const override { return {inner_}; }
  std::string kind() const override { return "alphabet-step"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;

  const Alphabet& D() const { return D_; }
  unsigned k() const { return k_; }
  double delta() const { return delta_; }
  const KWiseFamily& column_family() const { return col_; }
  // Column seeds of column_family().seed_bits() bits, k-wise across columns, built from
  // independent k-wise strings over chunks of at most 62 bits.
  const std::vector<KWiseFamily>& cross_parts() const { return cross_; }
  const Generator& inner() const { return *inner_; }

  // The D x n matrix X (row-major, X[l * n + j]) for the local seed bits.
  std::vector<Symbol> matrix(BitReader& in) const;

 private:
  double delta_;
  AlphabetStepParams p_;
  Alphabet D_;
  unsigned k_ = 2;
  KWiseFamily col_;
  std::vector<KWiseFamily> cross_;
  GenPtr inner_;
};

// Z_j = X[Y_j, j] for a row-major D x n matrix.
std::vector<Symbol> alphabet_combine(std::span<const Symbol> X, std::size_t D, std::span<const Symbol> Y);

// prod_j (1/D) sum_l f_j(X[l, j]).
cplx bias_function(const FourierShape& f, std::span<const Symbol> X, std::size_t D);

using GenFactory = std::function<GenPtr(Alphabet, std::size_t)>;

// Chain of alphabet steps from m down to the first alphabet <= n^4, each with error
// delta / steps, ending in base(m_last, n). Returns base(m, n) when m <= n^4.
GenPtr alphabet_reduce(Alphabet m, std::size_t n, double delta, const GenFactory& base, AlphabetStepParams params = {});
// Alphabets visited by the chain, m first.
std::vector<Alphabet> alphabet_chain(Alphabet m, std::size_t n);

struct DimStepParams {
  double C = 4;              // k = max(2, ceil(C ln(n/delta) / ln n))
  double delta_map = 1e-3;
};

// Dimension reduction: k-wise hash h: [n] -> [t], t = ceil(sqrt n); the inner generator
// gives t symbols of [2^r0], and coordinate i is G0(block h(i)) at position i, G0 the
// k-wise family over [m]^n with seed length r0. Seed: hash, then inner.
class DimStep final : public Generator {
 public:
  // The inner generator is built from (2^r0, t) once r0 is known.
  DimStep(Alphabet m, std::size_t n, double delta, const GenFactory& inner, DimStepParams params = {});

  std::size_t local_bits() const override { return hash_.seed_bits(); }
  std::vector<GenPtr> children() const override { return {inner_}; }
  std::string kind() const override { return "dim-step"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;

  std::size_t t() const { return t_; }
  unsigned k() const { return k_; }
  unsigned r0() const { return static_cast<unsigned>(g0_.seed_bits()); }
  Alphabet inner_alphabet() const { return Alphabet::pow2(r0()); }
  double delta() const { return delta_; }
  const CombinedHashFamily& hash() const { return hash_; }
  const KWiseFamily& bucket_family() const { return g0_; }
  const Generator& inner() const { return *inner_; }

  // Parameters without building an inner generator.
  static std::size_t bucket_count(std::size_t n);
  static unsigned independence(std::size_t n, double delta, double C);

 private:
  double delta_;
  DimStepParams p_;
  std::size_t t_ = 1;
  unsigned k_ = 2;
  CombinedHashFamily hash_;
  KWiseFamily g0_;
  GenPtr inner_;
};

// Every bucket of h has at most k/2 coordinates with variance >= alpha, and the variances
// below alpha sum to at most beta inside every bucket.
bool is_good_hash(std::span<const u64> h, const FourierShape& f, double alpha, double beta, unsigned k);

}  // namespace fprg
