// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fprg/common.hpp"
#include "fprg/rng.hpp"
#include "json.hpp"

namespace fprg {

using json = nlohmann::json;

// Integer-valued distribution on the window [lo, lo + p.size()).
struct IntPMF {
  long long lo = 0;
  std::vector<double> p{1.0};

  long long hi() const { return lo + static_cast<long long>(p.size()) - 1; }
  double at(long long j) const;
  // max |j| over the window
  long long max_abs() const;
  // Throws UsageError unless entries >= -1e-15 and the sum is 1 +- 1e-10.
  void validate() const;

  static IntPMF point(long long v);
  static IntPMF uniform(long long lo, long long hi);
  // Counts indexed from lo, normalized.
  static IntPMF from_counts(long long lo, std::span<const double> counts);

  json to_json() const;
  static IntPMF from_json(const json& j);
};

// Default DP window: 10^6 states.
inline constexpr std::size_t kDefaultWindowCap = 1'000'000;

// Exact law of sum_j g[j][X_j], X_j independent with P(X_j = x) = probs[j][x].
IntPMF sum_pmf(const std::vector<std::vector<long long>>& g, const std::vector<std::vector<double>>& probs,
               std::size_t window_cap = kDefaultWindowCap);
// <w, X> for X uniform on [m]^n.
IntPMF linear_pmf(std::span<const long long> w, u64 m, std::size_t window_cap = kDefaultWindowCap);
// <w, X> for X_j ~ base[j] (supports must be non-negative integers).
IntPMF linear_pmf(std::span<const long long> w, const std::vector<IntPMF>& base, std::size_t window_cap = kDefaultWindowCap);

double d_tv(const IntPMF& p, const IntPMF& q);
double d_k(const IntPMF& p, const IntPMF& q);

// E[exp(2 pi i alpha Z)]
std::complex<double> characteristic(const IntPMF& p, double alpha);

struct FourierDistance {
  double value = 0;       // max over the grid
  double slack = 0;       // the true max is at most value + slack
  std::size_t grid = 0;   // grid points in [0, 1)
  long long N = 0;
};

// Max of |E e(alpha Z1) - E e(alpha Z2)| over alpha in {0, 1/G, ..., (G-1)/G} with
// G >= 4 pi N / eta, N = max |support|. The Lipschitz constant is at most 4 pi N, so the
// grid under-approximates the max by at most eta. refine multiplies the grid density.
FourierDistance d_ft(const IntPMF& p, const IntPMF& q, double eta, unsigned refine = 1);

struct DistanceTriple {
  double d_ft = 0, d_tv = 0, d_k = 0, slack = 0;
  json to_json() const;
};
DistanceTriple distances(const IntPMF& p, const IntPMF& q, double eta);

// Checks d_tv <= 2 sqrt(4N+1) (d_ft + eta) and d_k <= C_K log2(2N+2) (d_ft + eta).
struct LemmaReport {
  long long N = 0;
  double eta = 0, C_K = 10;
  DistanceTriple dist;
  double tv_bound = 0, k_bound = 0;
  double tv_ratio = 0, k_ratio = 0;
  bool pass = true;
  json to_json() const;
};
LemmaReport fourier_lemma_check(const IntPMF& p, const IntPMF& q, double eta, double C_K = 10);

// Audit pairs with supports inside [-N, N]: independent laws, small perturbations,
// shifts, and point masses, chosen by the draw.
std::pair<IntPMF, IntPMF> random_pmf_pair(Rng& rng, long long N);

}  // namespace fprg
