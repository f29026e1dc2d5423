// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fprg/generator.hpp"
#include "fprg/shapes.hpp"

namespace fprg {

struct EvalMode {
  enum class Kind { enumerate, sample };
  Kind kind = Kind::enumerate;
  unsigned enum_cap = 26;  // enumerate refuses seeds longer than this
  u64 samples = 0;
  u64 rng_seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  static EvalMode enumerate(unsigned cap = 26);
  static EvalMode sample(u64 n, u64 rng_seed);
  // Enumerate when r <= cap, otherwise sample.
  EvalMode resolve(std::size_t r) const;
  json to_json() const;
};

struct Estimate {
  cplx value = 0;
  double std_err = 0;  // standard error of the complex mean; 0 when exact
  u64 seeds_used = 0;
  bool exact = false;
};

// Runs fn(i) for i in [0, count) on a small thread pool.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Seeds are split into 64 fixed shards (sample shard s draws from mt19937_64 seeded by
// seed_seq{rng_seed, s}), and partial results merge in shard order, so results do not
// depend on the thread count.
inline constexpr std::size_t kShards = 64;

// E_seed[fn(G(seed))].
Estimate expectation(const Generator& g, const EvalMode& mode, const std::function<cplx(std::span<const Symbol>)>& fn);
Estimate empirical_expectation(const FourierShape& f, const Generator& g, const EvalMode& mode);

// Multiset of generator outputs, collected once and reused across many tests.
class OutputSample {
 public:
  static OutputSample collect(const Generator& g, const EvalMode& mode);

  bool exact() const { return exact_; }
  u64 seeds_used() const { return total_; }
  std::size_t n() const { return n_; }
  std::size_t distinct() const { return counts_.size(); }
  std::span<const Symbol> output(std::size_t i) const { return {outputs_.data() + i * n_, n_}; }
  u64 count(std::size_t i) const { return counts_[i]; }

  Estimate expect(const std::function<cplx(std::span<const Symbol>)>& fn) const;
  Estimate expect(const FourierShape& f) const;
  // Pr[fn(x)] for a predicate.
  Estimate probability(const std::function<bool(std::span<const Symbol>)>& fn) const;

 private:
  bool exact_ = true;
  u64 total_ = 0;
  std::size_t n_ = 0;
  std::vector<Symbol> outputs_;
  std::vector<u64> counts_;
};

}  // namespace fprg
