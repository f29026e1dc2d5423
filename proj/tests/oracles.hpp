// Independent exact oracles shared by the test binaries.
#pragma once

#include <vector>

#include "fprg/families.hpp"
#include "fprg/shapes.hpp"

namespace oracle {

using fprg::cplx;
using fprg::u64;

// Exact E[f(Z)] for Z the low bit of a k-wise polynomial over GF(2^s), by Fourier expansion:
// f = prod_i (a_i + b_i (-1)^{Z_i}); the parity over S has expectation 1 when
// sum_{i in S} alpha_i^j = 0 for every j < k and 0 otherwise. n <= 22.
inline cplx kwise_binary_expectation(const fprg::FourierShape& f, const fprg::KWiseFamily& fam) {
  const std::size_t n = f.n();
  const fprg::Field& F = fam.field();
  const unsigned k = fam.k();
  std::vector<std::vector<u64>> pw(n, std::vector<u64>(k));
  for (std::size_t i = 0; i < n; ++i) {
    u64 p = 1;
    for (unsigned j = 0; j < k; ++j) {
      pw[i][j] = p;
      p = F.mul(p, i);
    }
  }
  cplx total = 0;
  std::vector<u64> beta(k);
  for (u64 S = 0; S < (u64{1} << n); ++S) {
    std::fill(beta.begin(), beta.end(), 0);
    cplx coef = 1;
    for (std::size_t i = 0; i < n; ++i) {
      cplx a = (f.at(i, 0) + f.at(i, 1)) / 2.0, b = (f.at(i, 0) - f.at(i, 1)) / 2.0;
      if ((S >> i) & 1) {
        coef *= b;
        for (unsigned j = 0; j < k; ++j) beta[j] ^= pw[i][j];
      } else {
        coef *= a;
      }
    }
    bool zero = true;
    for (u64 v : beta) zero = zero && v == 0;
    if (zero) total += coef;
  }
  return total;
}

// Sum over all of [m]^n, calling fn(x) for every vector.
template <class Fn>
void for_each_vector(u64 m, std::size_t n, Fn&& fn) {
  std::vector<fprg::Symbol> x(n, 0);
  for (;;) {
    fn(static_cast<const std::vector<fprg::Symbol>&>(x));
    std::size_t j = 0;
    while (j < n && ++x[j] == m) x[j++] = 0;
    if (j == n) return;
  }
}

}  // namespace oracle
