// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "fprg/rng.hpp"

namespace fprg {

EvalMode EvalMode::enumerate(unsigned cap) {
  EvalMode m;
  m.kind = Kind::enumerate;
  m.enum_cap = cap;
  return m;
}

EvalMode EvalMode::sample(u64 n, u64 rng_seed) {
  EvalMode m;
  m.kind = Kind::sample;
  m.samples = n;
  m.rng_seed = rng_seed;
  return m;
}

EvalMode EvalMode::resolve(std::size_t r) const {
  EvalMode m = *this;
  if (r <= enum_cap) {
    m.kind = Kind::enumerate;
  } else {
    if (samples == 0) throw RefusalError("enumerating 2^" + std::to_string(r) + " seeds exceeds the cap 2^" + std::to_string(enum_cap) + " and no sample budget is set");
    m.kind = Kind::sample;
  }
  return m;
}

json EvalMode::to_json() const {
  json j{{"mode", kind == Kind::enumerate ? "enumerate" : "sample"}, {"enum_cap", enum_cap}};
  if (kind == Kind::sample) {
    j["samples"] = samples;
    j["rng_seed"] = rng_seed;
  }
  return j;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned t = static_cast<unsigned>(std::min<std::size_t>(threads ? threads : hw, count));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

namespace {

EvalMode checked(const Generator& g, const EvalMode& mode) {
  std::size_t r = g.seed_bits();
  if (mode.kind == EvalMode::Kind::enumerate) {
    if (r > mode.enum_cap || r > 40)
      throw RefusalError("enumerating 2^" + std::to_string(r) + " seeds exceeds the cap 2^" + std::to_string(std::min(mode.enum_cap, 40u)));
  } else if (mode.samples == 0) {
    throw UsageError("sample mode needs a positive sample count");
  }
  return mode;
}

u64 shard_total(const Generator& g, const EvalMode& mode) {
  return mode.kind == EvalMode::Kind::enumerate ? u64{1} << g.seed_bits() : mode.samples;
}

// Calls visit(output) for every seed in shard s.
template <class Visit>
void run_shard(const Generator& g, const EvalMode& mode, std::size_t s, Visit&& visit) {
  u64 total = shard_total(g, mode);
  u64 lo = static_cast<u64>(u128{total} * s / kShards), hi = static_cast<u64>(u128{total} * (s + 1) / kShards);
  std::size_t r = g.seed_bits();
  std::vector<Symbol> out(g.n());
  if (mode.kind == EvalMode::Kind::enumerate) {
    BitString seed;
    for (u64 i = lo; i < hi; ++i) {
      seed.assign_uint(i, r);
      g.generate_into(seed, out);
      visit(std::span<const Symbol>(out));
    }
  } else {
    std::seed_seq seq{static_cast<std::uint32_t>(mode.rng_seed), static_cast<std::uint32_t>(mode.rng_seed >> 32), static_cast<std::uint32_t>(s)};
    Rng rng(seq);
    for (u64 i = lo; i < hi; ++i) {
      BitString seed = random_bits(rng, r);
      g.generate_into(seed, out);
      visit(std::span<const Symbol>(out));
    }
  }
}

Estimate finish(cplx sum, double sq, u64 n, bool exact) {
  Estimate e;
  e.seeds_used = n;
  e.exact = exact;
  if (n == 0) return e;
  double N = static_cast<double>(n);
  e.value = sum / N;
  if (!exact && n > 1) {
    double var = std::max(0.0, (sq - N * std::norm(e.value)) / (N - 1));
    e.std_err = std::sqrt(var / N);
  }
  return e;
}

}  // namespace

Estimate expectation(const Generator& g, const EvalMode& mode_in, const std::function<cplx(std::span<const Symbol>)>& fn) {
  EvalMode mode = checked(g, mode_in);
  std::vector<cplx> sums(kShards, 0);
  std::vector<double> sq(kShards, 0);
  parallel_for(kShards, mode.threads, [&](std::size_t s) {
    cplx a = 0;
    double b = 0;
    run_shard(g, mode, s, [&](std::span<const Symbol> x) {
      cplx v = fn(x);
      a += v;
      b += std::norm(v);
    });
    sums[s] = a;
    sq[s] = b;
  });
  cplx sum = 0;
  double q = 0;
  for (std::size_t s = 0; s < kShards; ++s) {
    sum += sums[s];
    q += sq[s];
  }
  return finish(sum, q, shard_total(g, mode), mode.kind == EvalMode::Kind::enumerate);
}

Estimate empirical_expectation(const FourierShape& f, const Generator& g, const EvalMode& mode) {
  if (!g.alphabet().materializable() || g.alphabet().size() != f.m() || g.n() != f.n())
    throw UsageError("generator and shape disagree on (m, n)");
  return expectation(g, mode, [&](std::span<const Symbol> x) { return f.eval(x); });
}

// ---- OutputSample ----

OutputSample OutputSample::collect(const Generator& g, const EvalMode& mode_in) {
  EvalMode mode = checked(g, mode_in);
  g.alphabet().size();  // refuses plan-only alphabets
  OutputSample o;
  o.exact_ = mode.kind == EvalMode::Kind::enumerate;
  o.total_ = shard_total(g, mode);
  o.n_ = g.n();
  const std::size_t n = g.n();
  const u64 m = g.alphabet().size();

  // dense index when m^n <= 2^20
  u64 space = 1;
  bool dense = true;
  for (std::size_t j = 0; j < n && dense; ++j) {
    if (space > (u64{1} << 20) / m) dense = false;
    space *= m;
  }
  std::mutex mu;
  if (dense) {
    std::vector<u64> counts(space, 0);
    parallel_for(kShards, mode.threads, [&](std::size_t s) {
      std::vector<u64> local(space, 0);
      run_shard(g, mode, s, [&](std::span<const Symbol> x) {
        u64 idx = 0;
        for (std::size_t j = n; j-- > 0;) idx = idx * m + x[j];
        ++local[idx];
      });
      std::lock_guard lock(mu);
      for (u64 i = 0; i < space; ++i) counts[i] += local[i];
    });
    for (u64 idx = 0; idx < space; ++idx) {
      if (!counts[idx]) continue;
      u64 v = idx;
      for (std::size_t j = 0; j < n; ++j) {
        o.outputs_.push_back(v % m);
        v /= m;
      }
      o.counts_.push_back(counts[idx]);
    }
    return o;
  }
  std::map<std::vector<Symbol>, u64> all;
  parallel_for(kShards, mode.threads, [&](std::size_t s) {
    std::unordered_map<std::string, u64> local;
    run_shard(g, mode, s, [&](std::span<const Symbol> x) {
      std::string key(reinterpret_cast<const char*>(x.data()), x.size_bytes());
      ++local[key];
    });
    std::lock_guard lock(mu);
    for (auto& [k, c] : local) {
      std::vector<Symbol> v(n);
      std::memcpy(v.data(), k.data(), k.size());
      all[v] += c;
    }
  });
  for (auto& [v, c] : all) {
    o.outputs_.insert(o.outputs_.end(), v.begin(), v.end());
    o.counts_.push_back(c);
  }
  return o;
}

Estimate OutputSample::expect(const std::function<cplx(std::span<const Symbol>)>& fn) const {
  cplx sum = 0;
  double sq = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    cplx v = fn(output(i));
    double c = static_cast<double>(counts_[i]);
    sum += c * v;
    sq += c * std::norm(v);
  }
  return finish(sum, sq, total_, exact_);
}

Estimate OutputSample::expect(const FourierShape& f) const {
  if (f.n() != n_) throw UsageError("shape dimension does not match the sample");
  return expect([&](std::span<const Symbol> x) { return f.eval(x); });
}

Estimate OutputSample::probability(const std::function<bool(std::span<const Symbol>)>& fn) const {
  return expect([&](std::span<const Symbol> x) { return cplx(fn(x) ? 1.0 : 0.0); });
}

}  // namespace fprg
