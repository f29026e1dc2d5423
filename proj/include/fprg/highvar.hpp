// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fprg/families.hpp"
#include "fprg/generator.hpp"
#include "fprg/robp.hpp"

namespace fprg {

// B_j = pi([2^j, 2^{j+1})) for j = 0..log2(n)-1; position 0 is left out.
std::vector<std::vector<u64>> bucket_split(const PairwisePermutation& pi, u64 n);

struct G1Params {
  unsigned p = 8;             // independence inside a bucket
  double delta_rec = 0.05;    // error of the recycling generator
  double delta_map = 1e-3;    // non-power-of-two symbol mapping budget
};

// Constant-error generator for shapes with tvar >= 1. A pairwise permutation of the padded
// index set [n'] splits it into dyadic buckets; position 0 joins bucket 0. Bucket j gets a
// min(p, |B_j|)-wise string whose seed is block j of an INW generator. Padding coordinates
// (index >= n) are dropped. Seed: permutation (2 log2 n') then INW.
class G1 final : public Generator {
 public:
  G1(Alphabet m, std::size_t n, G1Params params = {});

  std::size_t local_bits() const override { return perm_bits() + inw_.seed_bits(); }
  std::string kind() const override { return "g1"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;

  unsigned log_n() const { return t_; }
  std::size_t perm_bits() const { return perm_seed_bits(t_); }
  std::size_t buckets() const { return fams_.size(); }
  const KWiseFamily& bucket_family(std::size_t j) const { return fams_[j]; }
  const INWGenerator& recycler() const { return inw_; }
  const G1Params& knobs() const { return p_; }

  // One seeded copy, evaluated one coordinate at a time.
  class Instance {
   public:
    Symbol at(std::size_t i) const;

   private:
    friend class G1;
    const G1* g_ = nullptr;
    PairwisePermutation pi_;
    std::vector<std::vector<u64>> coeffs_;
  };
  Instance instance(BitReader& in) const;

 private:
  G1Params p_;
  unsigned t_ = 1;
  std::vector<KWiseFamily> fams_;
  INWGenerator inw_;
};

struct GLargeParams {
  double c_T = 0.125;      // T = min(n, max(16, ceil(c_T ln^5(1/delta))))
  G1Params g1;
  double delta_map = 1e-3;
};

// (B, l, delta)-spreading hash [n] -> [T]: a k-wise part plus a delta'-biased part.
class SpreadingFamily {
 public:
  SpreadingFamily() = default;
  SpreadingFamily(std::size_t n, double delta, double c_T = 0.125, double delta_map = 1e-3);

  std::size_t n() const { return n_; }
  u64 T() const { return T_; }
  double B() const { return 2.0 * static_cast<double>(T_); }
  unsigned ell() const { return ell_; }
  double delta() const { return delta_; }
  const CombinedHashFamily& hash() const { return hash_; }
  std::size_t seed_bits() const { return hash_.seed_bits(); }

  // Buckets j with ||v restricted to h^-1(j)||_2^2 >= B / 2T.
  std::size_t heavy_buckets(std::span<const double> v, std::span<const u64> h) const;
  json to_json() const;

 private:
  std::size_t n_ = 0;
  u64 T_ = 1;
  unsigned ell_ = 1;
  double delta_ = 0;
  CombinedHashFamily hash_;
};

// High-variance generator: spreading hash h, then coordinate i takes the value of the
// h(i)-th G1 copy, whose seeds are INW blocks (error delta/4). Seed: hash, then INW.
class GLarge final : public Generator {
 public:
  GLarge(Alphabet m, std::size_t n, double delta, GLargeParams params = {});

  std::size_t local_bits() const override { return spread_.seed_bits() + inw_.seed_bits(); }
  std::string kind() const override { return "glarge"; }
  void fill(BitReader& in, std::span<Symbol> out) const override;
  json params() const override;

  double delta() const { return delta_; }
  const SpreadingFamily& spreading() const { return spread_; }
  const G1& inner() const { return g1_; }
  const INWGenerator& recycler() const { return inw_; }
  const GLargeParams& knobs() const { return p_; }

 private:
  double delta_;
  GLargeParams p_;
  SpreadingFamily spread_;
  G1 g1_;
  INWGenerator inw_;
};

}  // namespace fprg
