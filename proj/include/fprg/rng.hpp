// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Portable draws from mt19937_64. The standard distributions are implementation
// defined, which would break byte-exact replay of campaigns across toolchains.

#include <cmath>
#include <random>

#include "fprg/bits.hpp"
#include "fprg/common.hpp"

namespace fprg {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform in [0, n), rejection sampling on the top of the range.
inline u64 uniform_below(Rng& rng, u64 n) {
  if (n <= 1) return 0;
  u64 limit = ~u64{0} - (~u64{0} % n);
  for (;;) {
    u64 v = rng();
    if (v < limit) return v % n;
  }
}

inline long long uniform_int(Rng& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(uniform_below(rng, static_cast<u64>(hi - lo) + 1));
}

// nbits fresh random bits.
inline BitString random_bits(Rng& rng, std::size_t nbits) {
  BitString s;
  while (s.size() + 64 <= nbits) s.append(rng(), 64);
  if (s.size() < nbits) s.append(rng() >> (64 - (nbits - s.size())), static_cast<unsigned>(nbits - s.size()));
  return s;
}

}  // namespace fprg
