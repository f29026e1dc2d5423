// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/apps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fprg {

namespace {

template <class T>
T get_field(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad ") + what + " document: " + e.what());
  }
}

void check_symbols(std::span<const Symbol> x, u64 m, const char* what) {
  for (Symbol s : x)
    if (s >= m) throw UsageError(std::string(what) + ": generator symbol " + std::to_string(s) + " outside [" + std::to_string(m) + "]");
}

void check_binary_sample(const OutputSample& o, const char* what) {
  for (std::size_t e = 0; e < o.distinct(); ++e) check_symbols(o.output(e), 2, what);
}

double upper_mass(const IntPMF& p, long long theta) {
  double s = 0;
  for (long long v = std::max(theta, p.lo); v <= p.hi(); ++v) s += p.at(v);
  return s;
}

AppError from_estimates(const Estimate& gen, double uniform, const OutputSample& o) {
  AppError r;
  r.generator = gen.value.real();
  r.uniform = uniform;
  r.error = std::abs(r.generator - uniform);
  r.std_err = gen.std_err;
  r.exact = o.exact();
  r.seeds = o.seeds_used();
  return r;
}

std::vector<std::vector<double>> uniform_laws(std::size_t n, u64 m) {
  return std::vector<std::vector<double>>(n, std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

}  // namespace

// ---- instance types ----

bool Halfspace::eval(std::span<const Symbol> x) const {
  long long s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * static_cast<long long>(x[i]);
  return s - theta >= 0;
}

json Halfspace::to_json() const { return {{"type", "halfspace"}, {"w", w}, {"theta", theta}}; }

Halfspace Halfspace::from_json(const json& j) {
  return {get_field<std::vector<long long>>(j, "w", "halfspace"), get_field<long long>(j, "theta", "halfspace")};
}

bool IntegerTables::eval(std::span<const Symbol> x) const {
  long long s = 0;
  for (std::size_t j = 0; j < G.size(); ++j) s += G[j][x[j]];
  return s >= theta;
}

GeneralizedHalfspace GeneralizedHalfspace::from(const Halfspace& h) {
  GeneralizedHalfspace g;
  for (long long w : h.w) g.g.push_back({0.0, static_cast<double>(w)});
  g.theta = static_cast<double>(h.theta);
  return g;
}

bool GeneralizedHalfspace::eval(std::span<const Symbol> x) const {
  double s = 0;
  for (std::size_t j = 0; j < g.size(); ++j) s += g[j][x[j]];
  return s >= theta;
}

IntegerTables GeneralizedHalfspace::canonical(std::size_t window_cap) const {
  const std::size_t n = g.size();
  if (n == 0) return {{}, theta <= 0 ? 0 : 1};
  const u64 m = this->m();
  for (const auto& row : g)
    if (row.size() != m || m == 0) throw UsageError("generalized halfspace tables must share one alphabet size");
  double spread = 0;
  for (const auto& row : g) {
    auto [a, b] = std::minmax_element(row.begin(), row.end());
    spread += *b - *a;
  }
  // scaled window is about 2^k * spread; cap it
  const double room = static_cast<double>(window_cap) - 1;
  const int kmax = spread > 0 ? static_cast<int>(std::floor(std::log2(room / spread))) : 0;

  auto scaled = [&](int k, bool exact) -> std::optional<std::vector<std::vector<long long>>> {
    std::vector<std::vector<long long>> G(n, std::vector<long long>(m));
    double win = 1;
    for (std::size_t j = 0; j < n; ++j) {
      for (u64 a = 0; a < m; ++a) {
        double v = std::ldexp(g[j][a], k);
        if (std::abs(v) > 4e18) return std::nullopt;
        if (exact && v != std::floor(v)) return std::nullopt;
        G[j][a] = std::llround(v);
      }
      auto [lo, hi] = std::minmax_element(G[j].begin(), G[j].end());
      win += static_cast<double>(*hi - *lo);
    }
    if (win > static_cast<double>(window_cap)) return std::nullopt;
    return G;
  };
  auto shift = [&](std::vector<std::vector<long long>> G, long long Theta) {
    IntegerTables t;
    for (auto& row : G) {
      long long mn = *std::min_element(row.begin(), row.end());
      for (long long& v : row) v -= mn;
      Theta -= mn;
    }
    t.G = std::move(G);
    t.theta = Theta;
    return t;
  };

  for (int k = std::min(0, kmax); k <= kmax; ++k) {
    auto G = scaled(k, true);
    if (!G) continue;
    double st = std::ldexp(theta, k);
    if (std::abs(st) > 4e18) break;
    return shift(std::move(*G), static_cast<long long>(std::ceil(st)));
  }
  // rounding: every rounded entry is within 1/2 of its scaled value
  for (int k = kmax; k >= std::min(0, kmax) - 8; --k) {
    auto G = scaled(k, false);
    if (!G) continue;
    IntPMF reach = sum_pmf(*G, uniform_laws(n, m), window_cap);
    const double st = std::ldexp(theta, k);
    const double half = static_cast<double>(n) / 2 + 1e-9 * (1 + std::abs(st));
    long long Theta = reach.hi() + 1;
    bool clear = true;
    for (long long v = reach.lo; v <= reach.hi(); ++v) {
      if (reach.at(v) <= 0) continue;
      double dv = static_cast<double>(v);
      if (std::abs(dv - st) <= half) {
        clear = false;
        break;
      }
      if (dv > st) Theta = std::min(Theta, v);
    }
    if (clear) return shift(std::move(*G), Theta);
  }
  throw RefusalError("generalized halfspace has no integer form within a window of " + std::to_string(window_cap) + " states");
}

Halfspace GeneralizedHalfspace::embed_binary(std::size_t window_cap) const {
  IntegerTables t = canonical(window_cap);
  Halfspace h;
  for (const auto& row : t.G) h.w.insert(h.w.end(), row.begin(), row.end());
  h.theta = t.theta;
  return h;
}

std::vector<Symbol> one_hot(std::span<const Symbol> x, u64 m) {
  std::vector<Symbol> b(x.size() * m, 0);
  for (std::size_t j = 0; j < x.size(); ++j) b[j * m + x[j]] = 1;
  return b;
}

json GeneralizedHalfspace::to_json() const { return {{"type", "gen-halfspace"}, {"g", g}, {"theta", theta}}; }

GeneralizedHalfspace GeneralizedHalfspace::from_json(const json& j) {
  GeneralizedHalfspace h{get_field<std::vector<std::vector<double>>>(j, "g", "generalized halfspace"),
                         get_field<double>(j, "theta", "generalized halfspace")};
  for (const auto& row : h.g)
    if (row.size() != h.m() || row.empty()) throw UsageError("generalized halfspace tables must share one alphabet size");
  return h;
}

u64 ModularTest::residue(std::span<const Symbol> x) const {
  long long s = 0;
  const long long M_ = static_cast<long long>(M);
  for (std::size_t i = 0; i < a.size(); ++i) s = (s + (a[i] % M_ + M_) % M_ * static_cast<long long>(x[i] % M)) % M_;
  return static_cast<u64>(s);
}

bool ModularTest::eval(std::span<const Symbol> x) const {
  u64 r = residue(x);
  return std::find(S.begin(), S.end(), r) != S.end();
}

json ModularTest::to_json() const { return {{"type", "modular"}, {"a", a}, {"M", M}, {"S", S}}; }

ModularTest ModularTest::from_json(const json& j) {
  ModularTest t{get_field<std::vector<long long>>(j, "a", "modular test"), get_field<u64>(j, "M", "modular test"),
                get_field<std::vector<u64>>(j, "S", "modular test")};
  if (t.M < 2) throw UsageError("modular test needs M >= 2");
  for (u64 s : t.S)
    if (s >= t.M) throw UsageError("modular test accepting set must lie in Z_M");
  return t;
}

bool CombinatorialShape::eval(std::span<const Symbol> x) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < g.size(); ++j) s += g[j][x[j]];
  return h[s] != 0;
}

json CombinatorialShape::to_json() const { return {{"type", "comb-shape"}, {"g", g}, {"h", h}}; }

CombinatorialShape CombinatorialShape::from_json(const json& j) {
  CombinatorialShape c{get_field<std::vector<std::vector<std::uint8_t>>>(j, "g", "combinatorial shape"),
                       get_field<std::vector<std::uint8_t>>(j, "h", "combinatorial shape")};
  if (c.h.size() != c.g.size() + 1) throw UsageError("combinatorial shape needs h on {0..n}");
  for (const auto& row : c.g) {
    if (row.size() != c.m() || row.empty()) throw UsageError("combinatorial shape tables must share one alphabet size");
    for (auto v : row)
      if (v > 1) throw UsageError("combinatorial shape tables are 0/1");
  }
  return c;
}

json AppError::to_json() const {
  return {{"error", error}, {"generator", generator}, {"uniform", uniform}, {"std_err", std_err}, {"exact", exact}, {"seeds", seeds}};
}

// ---- error evaluators ----

IntPMF output_sum_pmf(const OutputSample& o, const std::vector<std::vector<long long>>& G) {
  long long lo = 0, hi = 0;
  for (const auto& row : G) {
    auto [a, b] = std::minmax_element(row.begin(), row.end());
    lo += *a;
    hi += *b;
  }
  std::vector<double> counts(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (std::size_t e = 0; e < o.distinct(); ++e) {
    auto x = o.output(e);
    long long s = 0;
    for (std::size_t j = 0; j < G.size(); ++j) s += G[j][x[j]];
    counts[static_cast<std::size_t>(s - lo)] += static_cast<double>(o.count(e));
  }
  return IntPMF::from_counts(lo, counts);
}

AppError halfspace_error(const OutputSample& o, const Halfspace& h, std::size_t window_cap) {
  if (h.w.size() != o.n()) throw UsageError("halfspace dimension does not match the generator");
  check_binary_sample(o, "halfspace");
  IntPMF u = linear_pmf(h.w, 2, window_cap);
  return from_estimates(o.probability([&](std::span<const Symbol> x) { return h.eval(x); }), upper_mass(u, h.theta), o);
}

AppError halfspace_error(const Generator& g, const Halfspace& h, const EvalMode& mode, std::size_t window_cap) {
  if (!(g.alphabet() == Alphabet::of(2))) throw UsageError("halfspaces are tested over {0,1}^n");
  linear_pmf(h.w, 2, window_cap);  // refuse before spending seeds
  return halfspace_error(OutputSample::collect(g, mode), h, window_cap);
}

AppError gen_halfspace_error(const OutputSample& o, const GeneralizedHalfspace& gh, std::size_t window_cap) {
  if (gh.g.size() != o.n()) throw UsageError("generalized halfspace dimension does not match the generator");
  for (std::size_t e = 0; e < o.distinct(); ++e) check_symbols(o.output(e), gh.m(), "generalized halfspace");
  IntegerTables t = gh.canonical(window_cap);
  IntPMF u = sum_pmf(t.G, uniform_laws(t.G.size(), gh.m()), window_cap);
  return from_estimates(o.probability([&](std::span<const Symbol> x) { return t.eval(x); }), upper_mass(u, t.theta), o);
}

AppError gen_halfspace_error(const Generator& g, const GeneralizedHalfspace& gh, const EvalMode& mode, std::size_t window_cap) {
  if (!(g.alphabet() == Alphabet::of(gh.m()))) throw UsageError("generalized halfspace alphabet does not match the generator");
  gh.canonical(window_cap);
  return gen_halfspace_error(OutputSample::collect(g, mode), gh, window_cap);
}

AppError modular_error(const OutputSample& o, const ModularTest& t) {
  if (t.a.size() != o.n()) throw UsageError("modular test dimension does not match the generator");
  check_binary_sample(o, "modular test");
  const std::size_t M = static_cast<std::size_t>(t.M);
  std::vector<std::vector<long long>> G(t.a.size());
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    long long r = (t.a[i] % static_cast<long long>(M) + static_cast<long long>(M)) % static_cast<long long>(M);
    G[i] = {0, r};
  }
  IntPMF sum = sum_pmf(G, uniform_laws(G.size(), 2));
  std::vector<double> uni(M, 0.0), gen(M, 0.0);
  for (long long v = sum.lo; v <= sum.hi(); ++v) uni[static_cast<std::size_t>(v) % M] += sum.at(v);
  for (std::size_t e = 0; e < o.distinct(); ++e) gen[t.residue(o.output(e))] += static_cast<double>(o.count(e));
  const double N = static_cast<double>(o.seeds_used());
  AppError r;
  double tv = 0, se = 0;
  for (std::size_t k = 0; k < M; ++k) {
    gen[k] /= N;
    tv += std::abs(gen[k] - uni[k]);
    se += std::sqrt(gen[k] * (1 - gen[k]) / N);
  }
  for (u64 s : t.S) {
    r.generator += gen[s];
    r.uniform += uni[s];
  }
  r.error = tv / 2;
  r.std_err = o.exact() ? 0 : se / 2;
  r.exact = o.exact();
  r.seeds = o.seeds_used();
  return r;
}

AppError modular_error(const Generator& g, const ModularTest& t, const EvalMode& mode) {
  if (!(g.alphabet() == Alphabet::of(2))) throw UsageError("modular tests are run over {0,1}^n");
  return modular_error(OutputSample::collect(g, mode), t);
}

AppError comb_shape_error(const OutputSample& o, const CombinatorialShape& c) {
  if (c.g.size() != o.n()) throw UsageError("combinatorial shape dimension does not match the generator");
  for (std::size_t e = 0; e < o.distinct(); ++e) check_symbols(o.output(e), c.m(), "combinatorial shape");
  std::vector<std::vector<long long>> G(c.g.size());
  for (std::size_t j = 0; j < c.g.size(); ++j) G[j].assign(c.g[j].begin(), c.g[j].end());
  IntPMF u = sum_pmf(G, uniform_laws(G.size(), c.m()));
  double eu = 0;
  for (long long v = u.lo; v <= u.hi(); ++v) eu += u.at(v) * c.h[static_cast<std::size_t>(v)];
  return from_estimates(o.probability([&](std::span<const Symbol> x) { return c.eval(x); }), eu, o);
}

AppError comb_shape_error(const Generator& g, const CombinatorialShape& c, const EvalMode& mode) {
  if (!(g.alphabet() == Alphabet::of(c.m()))) throw UsageError("combinatorial shape alphabet does not match the generator");
  return comb_shape_error(OutputSample::collect(g, mode), c);
}

// ---- Chernoff sampler ----

std::vector<u64> quantize(std::span<const double> p, unsigned bits) {
  if (bits > 62) throw RefusalError("quantization beyond 62 bits");
  double total = 0;
  for (double x : p) {
    if (!(x >= 0)) throw UsageError("pmf entries must be non-negative");
    total += x;
  }
  if (!(total > 0)) throw UsageError("pmf has no mass");
  const u64 full = u64{1} << bits;
  std::vector<u64> c(p.size());
  std::vector<double> rem(p.size());
  u64 used = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    double v = std::ldexp(p[a] / total, static_cast<int>(bits));
    c[a] = static_cast<u64>(std::floor(v));
    rem[a] = v - std::floor(v);
    used += c[a];
  }
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rem[x] > rem[y]; });
  for (std::size_t i = 0; used < full; i = (i + 1) % order.size()) {
    ++c[order[i]];
    ++used;
  }
  // rounding of p / total can overshoot by a unit; take it back from the smallest remainders
  for (std::size_t i = order.size(); used > full;) {
    i = i == 0 ? order.size() - 1 : i - 1;
    if (c[order[i]] > 0) {
      --c[order[i]];
      --used;
    }
  }
  return c;
}

unsigned ChernoffSampler::default_bits(u64 m, std::size_t n, double eps) {
  if (!(eps > 0)) throw UsageError("eps must be positive");
  return static_cast<unsigned>(std::max(1.0, std::ceil(std::log2(static_cast<double>(m) * static_cast<double>(n) / eps) - 1e-12)));
}

ChernoffSampler::ChernoffSampler(std::vector<std::vector<double>> pmfs, unsigned r_x, GenPtr gen, double eps)
    : pmfs_(std::move(pmfs)), r_x_(r_x), gen_(std::move(gen)), eps_(eps) {
  if (pmfs_.empty()) throw UsageError("sampler needs at least one coordinate");
  for (const auto& p : pmfs_) {
    if (p.size() != pmfs_[0].size() || p.empty()) throw UsageError("sampler laws must share one alphabet");
    double s = 0;
    for (double x : p) {
      if (!(x >= -1e-15)) throw UsageError("sampler law has a negative entry");
      s += x;
    }
    if (std::abs(s - 1) > 1e-9) throw UsageError("sampler law does not sum to 1");
  }
  if (!gen_ || gen_->n() != pmfs_.size() || !(gen_->alphabet() == Alphabet::pow2(r_x_)))
    throw UsageError("sampler generator must produce [2^r_x]^n");
  for (const auto& p : pmfs_) {
    counts_.push_back(quantize(p, r_x_));
    std::vector<u64> cum(counts_.back().size());
    std::partial_sum(counts_.back().begin(), counts_.back().end(), cum.begin());
    cum_.push_back(std::move(cum));
  }
}

ChernoffSampler ChernoffSampler::build(std::vector<std::vector<double>> pmfs, double eps, const ComposeKnobs& knobs,
                                       std::optional<unsigned> r_x) {
  if (pmfs.empty()) throw UsageError("sampler needs at least one coordinate");
  unsigned bits = r_x ? *r_x : default_bits(pmfs[0].size(), pmfs.size(), eps);
  GenPtr g = build_generator(Alphabet::pow2(bits), pmfs.size(), eps, knobs);
  return ChernoffSampler(std::move(pmfs), bits, std::move(g), eps);
}

std::vector<double> ChernoffSampler::quantized(std::size_t i) const {
  std::vector<double> q(counts_[i].size());
  for (std::size_t a = 0; a < q.size(); ++a) q[a] = std::ldexp(static_cast<double>(counts_[i][a]), -static_cast<int>(r_x_));
  return q;
}

Symbol ChernoffSampler::map(std::size_t i, Symbol z) const {
  return static_cast<Symbol>(std::upper_bound(cum_[i].begin(), cum_[i].end(), z) - cum_[i].begin());
}

std::vector<Symbol> ChernoffSampler::sample(const BitString& seed) const {
  std::vector<Symbol> y = gen_->generate(seed);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = map(i, y[i]);
  return y;
}

json ChernoffSampler::to_json() const {
  return {{"m", m()}, {"n", n()}, {"r_x", r_x_}, {"eps", eps_}, {"seed_bits", seed_bits()}, {"generator", gen_->to_json()}};
}

json TailReport::to_json() const {
  return {{"tail", tail}, {"bound", bound}, {"std_err", std_err}, {"trials", trials}, {"pass", pass}};
}

TailReport chernoff_tail_check(const ChernoffSampler& s, const std::vector<std::vector<double>>& g, double t, u64 trials, u64 rng_seed) {
  if (g.size() != s.n()) throw UsageError("tail check needs one table per coordinate");
  double mu = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].size() != s.m()) throw UsageError("tail check tables must cover the alphabet");
    for (double v : g[i])
      if (v < -1 || v > 1) throw UsageError("tail check tables take values in [-1,1]");
    std::vector<double> q = s.quantized(i);
    for (std::size_t a = 0; a < q.size(); ++a) mu += q[a] * g[i][a];
  }
  TailReport r;
  r.trials = trials;
  r.bound = 2 * std::exp(-t * t / (2 * static_cast<double>(s.n()))) + s.eps();
  if (t <= 0 || trials == 0) {
    r.tail = 1;
    return r;
  }
  Rng rng(rng_seed);
  u64 hits = 0;
  for (u64 k = 0; k < trials; ++k) {
    std::vector<Symbol> y = s.sample(random_bits(rng, s.seed_bits()));
    double sum = 0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += g[i][y[i]];
    if (std::abs(sum - mu) >= t) ++hits;
  }
  r.tail = static_cast<double>(hits) / static_cast<double>(trials);
  r.std_err = std::sqrt(r.tail * (1 - r.tail) / static_cast<double>(trials));
  r.pass = r.tail <= r.bound + 3 * r.std_err;
  return r;
}

// ---- random instances ----

namespace {

// Threshold near the mean, within 1.5 standard deviations.
double central_threshold(Rng& rng, double mean, double var) {
  return mean + std::sqrt(var) * (3 * uniform01(rng) - 1.5);
}

}  // namespace

Halfspace random_halfspace(Rng& rng, std::size_t n, long long max_weight) {
  Halfspace h;
  double mean = 0, var = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long long w = uniform_int(rng, -max_weight, max_weight);
    h.w.push_back(w);
    mean += static_cast<double>(w) / 2;
    var += static_cast<double>(w * w) / 4;
  }
  h.theta = std::llround(central_threshold(rng, mean, var));
  return h;
}

GeneralizedHalfspace random_gen_halfspace(Rng& rng, u64 m, std::size_t n, long long max_weight) {
  GeneralizedHalfspace h;
  double mean = 0, var = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(m);
    double mu = 0, sq = 0;
    for (double& v : row) {
      v = static_cast<double>(uniform_int(rng, -max_weight, max_weight));
      mu += v / static_cast<double>(m);
      sq += v * v / static_cast<double>(m);
    }
    mean += mu;
    var += sq - mu * mu;
    h.g.push_back(std::move(row));
  }
  // half-integers keep the instance exactly representable
  h.theta = std::round(2 * central_threshold(rng, mean, var)) / 2;
  return h;
}

ModularTest random_modular(Rng& rng, std::size_t n, u64 M) {
  ModularTest t;
  t.M = M;
  for (std::size_t i = 0; i < n; ++i) t.a.push_back(static_cast<long long>(uniform_below(rng, M)));
  for (u64 r = 0; r < M; ++r)
    if (rng() & 1) t.S.push_back(r);
  if (t.S.empty()) t.S.push_back(uniform_below(rng, M));
  return t;
}

CombinatorialShape random_comb_shape(Rng& rng, u64 m, std::size_t n) {
  CombinatorialShape c;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::uint8_t> row(m);
    for (auto& v : row) v = static_cast<std::uint8_t>(rng() & 1);
    c.g.push_back(std::move(row));
  }
  c.h.resize(n + 1);
  for (auto& v : c.h) v = static_cast<std::uint8_t>(rng() & 1);
  return c;
}

}  // namespace fprg
