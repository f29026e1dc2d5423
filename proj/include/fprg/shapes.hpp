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
using cplx = std::complex<double>;

// f(x) = prod_j f_j(x_j), each f_j : [m] -> complex unit disk, stored as an n x m table.
class FourierShape {
 public:
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 20;

  FourierShape() = default;
  FourierShape(u64 m, std::size_t n, std::vector<cplx> table);
  static FourierShape constant(u64 m, std::size_t n, cplx c = 1.0);

  u64 m() const { return m_; }
  std::size_t n() const { return n_; }
  cplx at(std::size_t j, Symbol x) const { return table_[j * m_ + x]; }
  std::span<const cplx> row(std::size_t j) const { return {table_.data() + j * m_, m_}; }
  const std::vector<cplx>& table() const { return table_; }

  cplx eval(std::span<const Symbol> x) const;

  json to_json() const;
  static FourierShape from_json(const json& j);

 private:
  u64 m_ = 1;
  std::size_t n_ = 0;
  std::vector<cplx> table_;
};

struct ShapeStats {
  std::vector<cplx> mean;
  std::vector<double> var;
  double tvar = 0;
};

ShapeStats stats(const FourierShape& f);
double tvar(const FourierShape& f);
// prod_j mean(f_j): the exact expectation under uniform [m]^n.
cplx uniform_expectation(const FourierShape& f);
cplx eval(const FourierShape& f, std::span<const Symbol> x);

// table[j][x] = exp(2 pi i alpha w_j x)
FourierShape linear_shape(std::span<const long long> w, double alpha, u64 m);

enum class ShapeKind {
  disk,      // entries uniform in the unit disk
  circle,    // unit modulus, uniform phases
  balanced,  // f_j(x) = e^{i theta_j} w^{c_j x}, c_j in [1, m): mean 0, variance 1
};
ShapeKind parse_shape_kind(const std::string& s);
const char* to_string(ShapeKind k);
FourierShape random_shape(Rng& rng, u64 m, std::size_t n, ShapeKind kind = ShapeKind::disk);

// f'_j = mu_j + s (f_j - mu_j): same means, variances scaled by s^2.
FourierShape scale_toward_mean(const FourierShape& f, double s);
// f_z(y) = f(y + z mod m)
FourierShape shifted(const FourierShape& f, std::span<const Symbol> z);

}  // namespace fprg
