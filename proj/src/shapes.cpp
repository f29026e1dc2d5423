// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/shapes.hpp"

#include <cmath>
#include <numbers>

namespace fprg {

namespace {
constexpr double kDiskSlack = 1e-12;
constexpr double kTwoPi = 2 * std::numbers::pi;
}  // namespace

FourierShape::FourierShape(u64 m, std::size_t n, std::vector<cplx> table) : m_(m), n_(n), table_(std::move(table)) {
  if (m == 0) throw UsageError("shape alphabet must be non-empty");
  if (n != 0 && m > kMaxEntries / n) throw RefusalError("shape table exceeds 2^20 entries");
  if (table_.size() != m * n) throw UsageError("shape table must have n*m entries");
  for (const cplx& v : table_)
    if (!(std::abs(v) <= 1 + kDiskSlack)) throw UsageError("shape values must lie in the unit disk");
}

FourierShape FourierShape::constant(u64 m, std::size_t n, cplx c) { return FourierShape(m, n, std::vector<cplx>(m * n, c)); }

cplx FourierShape::eval(std::span<const Symbol> x) const {
  if (x.size() != n_) throw UsageError("input length does not match shape dimension");
  cplx p = 1.0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (x[j] >= m_) throw UsageError("symbol out of range for shape alphabet");
    p *= table_[j * m_ + x[j]];
  }
  return p;
}

json FourierShape::to_json() const {
  json rows = json::array();
  for (std::size_t j = 0; j < n_; ++j) {
    json r = json::array();
    for (const cplx& v : row(j)) r.push_back({v.real(), v.imag()});
    rows.push_back(std::move(r));
  }
  return json{{"m", m_}, {"n", n_}, {"table", std::move(rows)}};
}

FourierShape FourierShape::from_json(const json& j) {
  u64 m = j.at("m").get<u64>();
  std::size_t n = j.at("n").get<std::size_t>();
  const json& rows = j.at("table");
  if (rows.size() != n) throw UsageError("shape table must have n rows");
  std::vector<cplx> t;
  t.reserve(m * n);
  for (const json& r : rows) {
    if (r.size() != m) throw UsageError("shape rows must have m entries");
    for (const json& v : r) t.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  }
  return FourierShape(m, n, std::move(t));
}

ShapeStats stats(const FourierShape& f) {
  ShapeStats s;
  s.mean.resize(f.n());
  s.var.resize(f.n());
  double inv_m = 1.0 / static_cast<double>(f.m());
  for (std::size_t j = 0; j < f.n(); ++j) {
    cplx mu = 0;
    double sq = 0;
    for (const cplx& v : f.row(j)) {
      mu += v;
      sq += std::norm(v);
    }
    mu *= inv_m;
    s.mean[j] = mu;
    s.var[j] = sq * inv_m - std::norm(mu);
    s.tvar += s.var[j];
  }
  return s;
}

double tvar(const FourierShape& f) { return stats(f).tvar; }

cplx uniform_expectation(const FourierShape& f) {
  cplx p = 1.0;
  for (const cplx& mu : stats(f).mean) p *= mu;
  return p;
}

cplx eval(const FourierShape& f, std::span<const Symbol> x) { return f.eval(x); }

FourierShape linear_shape(std::span<const long long> w, double alpha, u64 m) {
  std::vector<cplx> t(w.size() * m);
  for (std::size_t j = 0; j < w.size(); ++j)
    for (u64 x = 0; x < m; ++x) {
      // reduce alpha*w*x mod 1 before scaling, to keep large products accurate
      double turns = alpha * static_cast<double>(w[j]) * static_cast<double>(x);
      turns -= std::floor(turns);
      t[j * m + x] = std::polar(1.0, kTwoPi * turns);
    }
  return FourierShape(m, w.size(), std::move(t));
}

ShapeKind parse_shape_kind(const std::string& s) {
  if (s == "disk") return ShapeKind::disk;
  if (s == "circle") return ShapeKind::circle;
  if (s == "balanced") return ShapeKind::balanced;
  throw UsageError("unknown shape kind '" + s + "'");
}

const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::disk: return "disk";
    case ShapeKind::circle: return "circle";
    case ShapeKind::balanced: return "balanced";
  }
  return "?";
}

FourierShape random_shape(Rng& rng, u64 m, std::size_t n, ShapeKind kind) {
  std::vector<cplx> t(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    double theta = kTwoPi * uniform01(rng);
    u64 c = m > 1 ? 1 + uniform_below(rng, m - 1) : 0;
    for (u64 x = 0; x < m; ++x) {
      cplx& v = t[j * m + x];
      switch (kind) {
        case ShapeKind::disk: {
          double r = std::sqrt(uniform01(rng));
          v = std::polar(r, kTwoPi * uniform01(rng));
          break;
        }
        case ShapeKind::circle: v = std::polar(1.0, kTwoPi * uniform01(rng)); break;
        case ShapeKind::balanced:
          v = std::polar(1.0, theta + kTwoPi * static_cast<double>((c * x) % m) / static_cast<double>(m));
          break;
      }
    }
  }
  return FourierShape(m, n, std::move(t));
}

FourierShape scale_toward_mean(const FourierShape& f, double s) {
  if (!(s >= 0 && s <= 1)) throw UsageError("scale factor must be in [0,1]");
  ShapeStats st = stats(f);
  std::vector<cplx> t = f.table();
  for (std::size_t j = 0; j < f.n(); ++j)
    for (u64 x = 0; x < f.m(); ++x) t[j * f.m() + x] = st.mean[j] + s * (t[j * f.m() + x] - st.mean[j]);
  return FourierShape(f.m(), f.n(), std::move(t));
}

FourierShape shifted(const FourierShape& f, std::span<const Symbol> z) {
  if (z.size() != f.n()) throw UsageError("shift length does not match shape dimension");
  std::vector<cplx> t(f.table().size());
  for (std::size_t j = 0; j < f.n(); ++j)
    for (u64 y = 0; y < f.m(); ++y) t[j * f.m() + y] = f.at(j, (y + z[j] % f.m()) % f.m());
  return FourierShape(f.m(), f.n(), std::move(t));
}

}  // namespace fprg
