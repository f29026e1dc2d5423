// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "fprg/harness.hpp"

namespace fprg {

// ---- IntPMF ----

double IntPMF::at(long long j) const {
  if (j < lo || j > hi()) return 0;
  return p[static_cast<std::size_t>(j - lo)];
}

long long IntPMF::max_abs() const { return std::max(std::llabs(lo), std::llabs(hi())); }

void IntPMF::validate() const {
  if (p.empty()) throw UsageError("pmf has an empty window");
  double s = 0;
  for (double x : p) {
    if (!(x >= -1e-15)) throw UsageError("pmf has a negative or NaN entry");
    s += x;
  }
  if (std::abs(s - 1) > 1e-10) throw UsageError("pmf sums to " + std::to_string(s));
}

IntPMF IntPMF::point(long long v) { return {v, {1.0}}; }

IntPMF IntPMF::uniform(long long lo, long long hi) {
  if (hi < lo) throw UsageError("uniform pmf needs lo <= hi");
  std::size_t w = static_cast<std::size_t>(hi - lo + 1);
  return {lo, std::vector<double>(w, 1.0 / static_cast<double>(w))};
}

IntPMF IntPMF::from_counts(long long lo, std::span<const double> counts) {
  double s = 0;
  for (double c : counts) s += c;
  if (counts.empty() || !(s > 0)) throw UsageError("pmf counts must have positive total");
  IntPMF r{lo, std::vector<double>(counts.begin(), counts.end())};
  for (double& x : r.p) x /= s;
  return r;
}

json IntPMF::to_json() const { return {{"lo", lo}, {"probs", p}}; }

IntPMF IntPMF::from_json(const json& j) {
  IntPMF r;
  try {
    r.lo = j.at("lo").get<long long>();
    r.p = j.at("probs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad pmf document: ") + e.what());
  }
  r.validate();
  return r;
}

// ---- DP oracles ----

IntPMF sum_pmf(const std::vector<std::vector<long long>>& g, const std::vector<std::vector<double>>& probs, std::size_t window_cap) {
  if (g.size() != probs.size()) throw UsageError("sum_pmf: table and law counts differ");
  long long lo = 0, hi = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g[j].size() != probs[j].size() || g[j].empty()) throw UsageError("sum_pmf: table and law sizes differ");
    auto [a, b] = std::minmax_element(g[j].begin(), g[j].end());
    lo += *a;
    hi += *b;
    if (static_cast<double>(hi) - static_cast<double>(lo) + 1 > static_cast<double>(window_cap))
      throw RefusalError("pmf window " + std::to_string(hi - lo + 1) + " exceeds the cap " + std::to_string(window_cap));
  }
  std::vector<double> cur{1.0}, next;
  long long cur_lo = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    auto [a, b] = std::minmax_element(g[j].begin(), g[j].end());
    next.assign(cur.size() + static_cast<std::size_t>(*b - *a), 0.0);
    for (std::size_t x = 0; x < g[j].size(); ++x) {
      double px = probs[j][x];
      if (px == 0) continue;
      std::size_t off = static_cast<std::size_t>(g[j][x] - *a);
      for (std::size_t s = 0; s < cur.size(); ++s) next[s + off] += cur[s] * px;
    }
    cur_lo += *a;
    cur.swap(next);
  }
  return {cur_lo, std::move(cur)};
}

IntPMF linear_pmf(std::span<const long long> w, u64 m, std::size_t window_cap) {
  if (m == 0) throw UsageError("linear_pmf needs m >= 1");
  if (static_cast<double>(m) > static_cast<double>(window_cap)) throw RefusalError("alphabet exceeds the pmf window cap");
  std::vector<std::vector<long long>> g(w.size());
  std::vector<std::vector<double>> pr(w.size(), std::vector<double>(m, 1.0 / static_cast<double>(m)));
  for (std::size_t j = 0; j < w.size(); ++j) {
    g[j].resize(m);
    for (u64 x = 0; x < m; ++x) g[j][x] = w[j] * static_cast<long long>(x);
  }
  return sum_pmf(g, pr, window_cap);
}

IntPMF linear_pmf(std::span<const long long> w, const std::vector<IntPMF>& base, std::size_t window_cap) {
  if (w.size() != base.size()) throw UsageError("linear_pmf: weight and law counts differ");
  std::vector<std::vector<long long>> g(w.size());
  std::vector<std::vector<double>> pr(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (base[j].lo < 0) throw UsageError("linear_pmf: symbol laws live on non-negative integers");
    for (std::size_t x = 0; x < base[j].p.size(); ++x) {
      g[j].push_back(w[j] * (base[j].lo + static_cast<long long>(x)));
      pr[j].push_back(base[j].p[x]);
    }
  }
  return sum_pmf(g, pr, window_cap);
}

// ---- distances ----

double d_tv(const IntPMF& p, const IntPMF& q) {
  long long lo = std::min(p.lo, q.lo), hi = std::max(p.hi(), q.hi());
  double s = 0;
  for (long long j = lo; j <= hi; ++j) s += std::abs(p.at(j) - q.at(j));
  return std::min(1.0, s / 2);
}

double d_k(const IntPMF& p, const IntPMF& q) {
  long long lo = std::min(p.lo, q.lo), hi = std::max(p.hi(), q.hi());
  double cp = 0, cq = 0, best = 0;
  for (long long j = lo; j <= hi; ++j) {
    cp += p.at(j);
    cq += q.at(j);
    best = std::max(best, std::abs(cp - cq));
  }
  return std::min(1.0, best);
}

std::complex<double> characteristic(const IntPMF& p, double alpha) {
  std::complex<double> s = 0;
  for (std::size_t t = 0; t < p.p.size(); ++t) {
    double ang = 2 * std::numbers::pi * alpha * static_cast<double>(p.lo + static_cast<long long>(t));
    s += p.p[t] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return s;
}

namespace {

std::mutex fftw_planner;  // FFTW planning is not thread-safe; execution is

}  // namespace

// The difference d = p - q lives on [lo, hi]; |D(alpha)| does not depend on the shift by lo.
// Grid points k/G with G = R*M are split as k = r + R*s, so that
//   D((r + R s)/G) = sum_t (d_t e(r t / G)) e(s t / M),
// one M-point transform per residue r. Residues are sharded and merged by max.
FourierDistance d_ft(const IntPMF& p, const IntPMF& q, double eta, unsigned refine) {
  if (!(eta > 0)) throw UsageError("d_ft needs eta > 0");
  FourierDistance out;
  out.N = std::max<long long>(1, std::max(p.max_abs(), q.max_abs()));
  out.slack = eta;
  const long long lo = std::min(p.lo, q.lo), hi = std::max(p.hi(), q.hi());
  const std::size_t W = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> d(W);
  for (std::size_t t = 0; t < W; ++t) d[t] = p.at(lo + static_cast<long long>(t)) - q.at(lo + static_cast<long long>(t));

  const double need = 4 * std::numbers::pi * static_cast<double>(out.N) / eta * std::max(1u, refine);
  const std::size_t M = pow2ceil(std::max<std::size_t>({W, 1024, std::min<std::size_t>(65536, static_cast<std::size_t>(need / 64))}));
  const std::size_t R = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(need / static_cast<double>(M))));
  out.grid = R * M;
  const double G = static_cast<double>(out.grid);

  const std::size_t shards = std::min<std::size_t>(R, 16);
  std::vector<double> best(shards, 0.0);
  parallel_for(shards, 0, [&](std::size_t sh) {
    fftw_complex* buf = fftw_alloc_complex(M);
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lk(fftw_planner);
      plan = fftw_plan_dft_1d(static_cast<int>(M), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    double mx = 0;
    for (std::size_t r = sh; r < R; r += shards) {
      for (std::size_t t = 0; t < M; ++t) {
        if (t < W && d[t] != 0) {
          double ang = 2 * std::numbers::pi * static_cast<double>((r * t) % out.grid) / G;
          buf[t][0] = d[t] * std::cos(ang);
          buf[t][1] = d[t] * std::sin(ang);
        } else {
          buf[t][0] = buf[t][1] = 0;
        }
      }
      fftw_execute(plan);
      for (std::size_t s = 0; s < M; ++s) mx = std::max(mx, std::hypot(buf[s][0], buf[s][1]));
    }
    {
      std::lock_guard<std::mutex> lk(fftw_planner);
      fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    best[sh] = mx;
  });
  out.value = std::min(2.0, *std::max_element(best.begin(), best.end()));
  return out;
}

json DistanceTriple::to_json() const { return {{"d_ft", d_ft}, {"d_tv", d_tv}, {"d_k", d_k}, {"slack", slack}}; }

DistanceTriple distances(const IntPMF& p, const IntPMF& q, double eta) {
  FourierDistance f = d_ft(p, q, eta);
  return {f.value, d_tv(p, q), d_k(p, q), f.slack};
}

json LemmaReport::to_json() const {
  return {{"N", N}, {"eta", eta}, {"C_K", C_K}, {"dist", dist.to_json()}, {"tv_bound", tv_bound}, {"k_bound", k_bound},
          {"tv_ratio", tv_ratio}, {"k_ratio", k_ratio}, {"pass", pass}};
}

LemmaReport fourier_lemma_check(const IntPMF& p, const IntPMF& q, double eta, double C_K) {
  LemmaReport r;
  r.eta = eta;
  r.C_K = C_K;
  r.dist = distances(p, q, eta);
  r.N = std::max<long long>(1, std::max(p.max_abs(), q.max_abs()));
  const double Nd = static_cast<double>(r.N);
  r.tv_bound = 2 * std::sqrt(4 * Nd + 1) * (r.dist.d_ft + eta);
  r.k_bound = C_K * std::log2(2 * Nd + 2) * (r.dist.d_ft + eta);
  r.tv_ratio = r.dist.d_tv / r.tv_bound;
  r.k_ratio = r.dist.d_k / r.k_bound;
  r.pass = r.tv_ratio <= 1 && r.k_ratio <= 1;
  return r;
}

namespace {

IntPMF random_pmf(Rng& rng, long long lo, long long hi) {
  IntPMF r{lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1))};
  // sparse-ish weights: cubed uniforms concentrate mass on a few points
  for (double& x : r.p) {
    double u = uniform01(rng);
    x = u * u * u;
  }
  r.p[uniform_below(rng, r.p.size())] += 1;
  return IntPMF::from_counts(lo, r.p);
}

}  // namespace

std::pair<IntPMF, IntPMF> random_pmf_pair(Rng& rng, long long N) {
  auto window = [&] {
    long long a = uniform_int(rng, -N, N), b = uniform_int(rng, -N, N);
    return std::pair{std::min(a, b), std::max(a, b)};
  };
  switch (uniform_below(rng, 4)) {
    case 0: {
      auto [a, b] = window();
      auto [c, d] = window();
      return {random_pmf(rng, a, b), random_pmf(rng, c, d)};
    }
    case 1: {
      auto [a, b] = window();
      IntPMF p = random_pmf(rng, a, b), q = p;
      double mix = std::pow(10.0, -1 - 4 * uniform01(rng));
      IntPMF noise = random_pmf(rng, a, b);
      for (std::size_t t = 0; t < q.p.size(); ++t) q.p[t] = (1 - mix) * q.p[t] + mix * noise.p[t];
      return {p, q};
    }
    case 2: {
      auto [a, b] = window();
      if (b == N) --b;
      if (b < a) a = b;
      IntPMF p = random_pmf(rng, a, b), q = p;
      q.lo += 1;
      return {p, q};
    }
    default:
      return {IntPMF::point(uniform_int(rng, -N, N)), IntPMF::point(uniform_int(rng, -N, N))};
  }
}

}  // namespace fprg
