// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/field.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace fprg {

namespace {

// x^t = kLow[t] for the built-in moduli.
constexpr std::array<u64, 65> kLow = {
    0,          0x1,  0x3,  0x3,        0x3,  0x5,  0x3,  0x3,   0x1b,    0x3,  0x9,  0x5,   0x9,
    0x1b,       0x21, 0x3,  0x2b,       0x9,  0x9,  0x27, 0x9,   0x5,     0x3,  0x21, 0x1b,  0x9,
    0x1b,       0x27, 0x3,  0x5,        0x3,  0x9,  0x8d, 0x401, 0x81,    0x5,  0x201, 0x53, 0x63,
    0x11,       0x39, 0x9,  0x81,       0x59, 0x21, 0x1b, 0x3,   0x21,    0x2d, 0x201, 0x1d, 0x4b,
    0x9,        0x47, 0x201, 0x81,      0x95, 0x11, 0x80001, 0x95, 0x3,   0x27, 0x20000001, 0x3, 0x1b};

// Moduli for wide fields of degree 64w, 2 <= w <= 64, same search order as below.
const std::map<unsigned, std::vector<unsigned>>& wide_table() {
  static const std::map<unsigned, std::vector<unsigned>> t = {
    {128, {7, 2, 1, 0}},
    {192, {7, 2, 1, 0}},
    {256, {10, 5, 2, 0}},
    {320, {4, 3, 1, 0}},
    {384, {12, 3, 2, 0}},
    {448, {11, 6, 4, 0}},
    {512, {8, 5, 2, 0}},
    {576, {13, 4, 3, 0}},
    {640, {14, 3, 2, 0}},
    {704, {8, 3, 2, 0}},
    {768, {19, 17, 4, 0}},
    {832, {13, 5, 2, 0}},
    {896, {7, 5, 3, 0}},
    {960, {12, 9, 3, 0}},
    {1024, {19, 6, 1, 0}},
    {1088, {22, 21, 10, 0}},
    {1152, {15, 3, 2, 0}},
    {1216, {27, 25, 9, 0}},
    {1280, {12, 7, 5, 0}},
    {1344, {15, 6, 1, 0}},
    {1408, {14, 13, 6, 0}},
    {1472, {11, 4, 1, 0}},
    {1536, {21, 6, 2, 0}},
    {1600, {14, 11, 1, 0}},
    {1664, {17, 9, 6, 0}},
    {1728, {11, 10, 5, 0}},
    {1792, {17, 14, 3, 0}},
    {1856, {11, 9, 4, 0}},
    {1920, {11, 3, 2, 0}},
    {1984, {13, 11, 5, 0}},
    {2048, {19, 14, 13, 0}},
    {2112, {16, 13, 7, 0}},
    {2176, {15, 8, 1, 0}},
    {2240, {23, 7, 1, 0}},
    {2304, {8, 7, 5, 0}},
    {2368, {13, 11, 8, 0}},
    {2432, {29, 22, 19, 0}},
    {2496, {12, 3, 1, 0}},
    {2560, {9, 3, 1, 0}},
    {2624, {15, 10, 4, 0}},
    {2688, {21, 10, 6, 0}},
    {2752, {15, 4, 2, 0}},
    {2816, {21, 19, 8, 0}},
    {2880, {13, 10, 6, 0}},
    {2944, {5, 3, 2, 0}},
    {3008, {15, 13, 1, 0}},
    {3072, {11, 10, 5, 0}},
    {3136, {15, 12, 10, 0}},
    {3200, {11, 6, 4, 0}},
    {3264, {17, 5, 2, 0}},
    {3328, {17, 9, 2, 0}},
    {3392, {23, 13, 6, 0}},
    {3456, {19, 18, 9, 0}},
    {3520, {32, 29, 3, 0}},
    {3584, {25, 12, 10, 0}},
    {3648, {23, 7, 2, 0}},
    {3712, {13, 12, 7, 0}},
    {3776, {7, 5, 4, 0}},
    {3840, {27, 9, 1, 0}},
    {3904, {17, 13, 2, 0}},
    {3968, {25, 18, 14, 0}},
    {4032, {15, 13, 6, 0}},
    {4096, {27, 15, 1, 0}}};
  return t;
}

u128 clmul_sw(u64 a, u64 b) {
  u128 r = 0;
  while (b) {
    r ^= u128{a} << std::countr_zero(b);
    b &= b - 1;
  }
  return r;
}

#if defined(__x86_64__)
__attribute__((target("pclmul,sse2"))) u128 clmul_hw(u64 a, u64 b) {
  __m128i r = _mm_clmulepi64_si128(_mm_set_epi64x(0, static_cast<long long>(a)),
                                   _mm_set_epi64x(0, static_cast<long long>(b)), 0);
  u64 lo = static_cast<u64>(_mm_cvtsi128_si64(r));
  u64 hi = static_cast<u64>(_mm_cvtsi128_si64(_mm_srli_si128(r, 8)));
  return (u128{hi} << 64) | lo;
}
const bool kHaveClmul = __builtin_cpu_supports("pclmul");
#endif

// ---- word-vector GF(2)[x] helpers ----

using Poly = std::vector<u64>;

long degree_of(const Poly& p) {
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i]) return static_cast<long>(i * 64 + 63 - std::countl_zero(p[i]));
  return -1;
}

u64 get_bits(const Poly& p, std::size_t pos) {
  std::size_t w = pos / 64, s = pos % 64;
  u64 lo = w < p.size() ? p[w] >> s : 0;
  u64 hi = (s && w + 1 < p.size()) ? p[w + 1] << (64 - s) : 0;
  return lo | hi;
}

void xor_bits(Poly& p, std::size_t pos, u64 v) {
  std::size_t w = pos / 64, s = pos % 64;
  if (w < p.size()) p[w] ^= v << s;
  if (s && w + 1 < p.size()) p[w + 1] ^= v >> (64 - s);
}

// Reduce in place modulo a sparse modulus; result occupies ceil(d/64) words.
void reduce(Poly& r, const Gf2Modulus& m) {
  const std::size_t d = m.degree;
  for (;;) {
    long deg = degree_of(r);
    if (deg < static_cast<long>(d)) break;
    std::size_t nchunks = (static_cast<std::size_t>(deg) - d) / 64 + 1;
    for (std::size_t j = nchunks; j-- > 0;) {
      std::size_t pos = d + 64 * j;
      u64 c = get_bits(r, pos);
      if (!c) continue;
      xor_bits(r, pos, c);
      for (unsigned e : m.taps) xor_bits(r, 64 * j + e, c);
    }
  }
  r.resize((d + 63) / 64);
}

Poly mul_raw(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      u128 p = clmul64(a[i], b[j]);
      r[i + j] ^= static_cast<u64>(p);
      r[i + j + 1] ^= static_cast<u64>(p >> 64);
    }
  }
  return r;
}

const std::array<std::uint16_t, 256>& spread_table() {
  static const std::array<std::uint16_t, 256> t = [] {
    std::array<std::uint16_t, 256> a{};
    for (unsigned v = 0; v < 256; ++v) {
      unsigned s = 0;
      for (unsigned k = 0; k < 8; ++k) s |= ((v >> k) & 1u) << (2 * k);
      a[v] = static_cast<std::uint16_t>(s);
    }
    return a;
  }();
  return t;
}

Poly sqr_raw(const Poly& a) {
  const auto& t = spread_table();
  Poly r(2 * a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    u64 lo = 0, hi = 0;
    for (unsigned k = 0; k < 4; ++k) {
      lo |= u64{t[(a[i] >> (8 * k)) & 0xff]} << (16 * k);
      hi |= u64{t[(a[i] >> (8 * k + 32)) & 0xff]} << (16 * k);
    }
    r[2 * i] = lo;
    r[2 * i + 1] = hi;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b) {
  std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0);
  b.resize(n, 0);
  long da = degree_of(a), db = degree_of(b);
  while (db >= 0) {
    while (da >= db) {
      std::size_t sh = static_cast<std::size_t>(da - db);
      for (std::size_t pos = 0; pos <= static_cast<std::size_t>(db); pos += 64) xor_bits(a, pos + sh, get_bits(b, pos));
      da = degree_of(a);
    }
    std::swap(a, b);
    std::swap(da, db);
  }
  return a;
}

std::vector<unsigned> prime_factors(unsigned n) {
  std::vector<unsigned> f;
  for (unsigned p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      f.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) f.push_back(n);
  return f;
}

Gf2Modulus from_low(unsigned t, u64 low) {
  Gf2Modulus m;
  m.degree = t;
  for (unsigned e = 64; e-- > 0;)
    if ((low >> e) & 1) m.taps.push_back(e);
  return m;
}

}  // namespace

u128 clmul64(u64 a, u64 b) {
#if defined(__x86_64__)
  if (kHaveClmul) return clmul_hw(a, b);
#endif
  return clmul_sw(a, b);
}

Gf2Modulus builtin_modulus(unsigned t) {
  if (t < 1 || t > 64) throw UsageError("built-in GF(2^t) table covers 1 <= t <= 64");
  return from_low(t, kLow[t]);
}

bool is_irreducible(const Gf2Modulus& f) {
  const unsigned d = f.degree;
  if (d == 0) return false;
  if (d == 1) return true;
  const std::size_t w = (d + 63) / 64;
  Poly fpoly(d / 64 + 1, 0);
  fpoly[d / 64] |= u64{1} << (d % 64);
  for (unsigned e : f.taps) fpoly[e / 64] ^= u64{1} << (e % 64);

  std::vector<unsigned> primes = prime_factors(d);
  std::map<unsigned, Poly> wanted;
  for (unsigned r : primes) wanted[d / r] = {};

  auto coprime_to_f = [&](const Poly& v) {
    Poly g(v.begin(), v.begin() + static_cast<long>(w));
    g[0] ^= 2;  // x^(2^k) - x
    return degree_of(poly_gcd(fpoly, g)) == 0;
  };
  Poly x(w, 0);
  x[0] = 2;
  Poly cur = x;
  for (unsigned k = 1; k <= d; ++k) {
    cur = sqr_raw(cur);
    reduce(cur, f);
    // a factor of degree dividing k shows up early; most reducible candidates stop here
    if (k <= 12 && k < d && !coprime_to_f(cur)) return false;
    auto it = wanted.find(k);
    if (it != wanted.end()) it->second = cur;
  }
  if (cur != x) return false;
  for (auto& [k, v] : wanted)
    if (!coprime_to_f(v)) return false;
  return true;
}

Gf2Modulus search_irreducible(unsigned d) {
  if (d == 0) throw UsageError("field degree must be positive");
  if (d == 1) return Gf2Modulus{1, {0}};
  for (unsigned a = 1; a < d; ++a) {
    Gf2Modulus m{d, {a, 0}};
    if (is_irreducible(m)) return m;
  }
  for (unsigned a = 3; a < d; ++a)
    for (unsigned b = 2; b < a; ++b)
      for (unsigned c = 1; c < b; ++c) {
        Gf2Modulus m{d, {a, b, c, 0}};
        if (is_irreducible(m)) return m;
      }
  throw RefusalError("no sparse irreducible polynomial of degree " + std::to_string(d));
}

const Gf2Modulus& modulus_for(unsigned degree) {
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<Gf2Modulus>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[degree];
  if (!slot) {
    auto it = wide_table().find(degree);
    if (degree <= 64)
      slot = std::make_unique<Gf2Modulus>(builtin_modulus(degree));
    else if (it != wide_table().end())
      slot = std::make_unique<Gf2Modulus>(Gf2Modulus{degree, it->second});
    else
      slot = std::make_unique<Gf2Modulus>(search_irreducible(degree));
  }
  return *slot;
}

// ---- primes ----

namespace {
u64 mulmod_u64(u64 a, u64 b, u64 m) { return static_cast<u64>((u128{a} * b) % m); }
u64 powmod_u64(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}
}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

u64 next_prime(u64 lo) {
  if (lo <= 2) return 2;
  if (lo > (u64{1} << 62)) throw RefusalError("prime field would exceed 62 bits");
  u64 n = lo | 1;
  while (!is_prime_u64(n)) n += 2;
  return n;
}

// ---- Field ----

Field Field::binary(unsigned t) {
  if (t == 0 || t > 64) throw RefusalError("GF(2^" + std::to_string(t) + ") needs elements wider than 64 bits");
  Field f;
  f.kind_ = Kind::binary;
  f.t_ = t;
  f.p_ = 2;
  f.low_ = kLow[t];
  return f;
}

Field Field::prime(u64 p) {
  if (!is_prime_u64(p)) throw UsageError(std::to_string(p) + " is not prime");
  if (p > (u64{1} << 62)) throw RefusalError("prime field exceeds 62 bits");
  Field f;
  f.kind_ = Kind::prime;
  f.t_ = 1;
  f.p_ = p;
  f.low_ = 0;
  return f;
}

u64 Field::mul(u64 a, u64 b) const {
  if (kind_ == Kind::prime) return static_cast<u64>((u128{a} * b) % p_);
  u128 r = clmul64(a, b);
  const u128 mask = t_ == 64 ? ~u128{0} >> 64 : (u128{1} << t_) - 1;
  for (u128 hi = r >> t_; hi; hi = r >> t_) {
    r &= mask;
    u128 lo = clmul64(static_cast<u64>(hi), low_);
    u64 top = static_cast<u64>(hi >> 64);
    if (top) lo ^= clmul64(top, low_) << 64;
    r ^= lo;
  }
  return static_cast<u64>(r);
}

u64 Field::pow(u64 a, u64 e) const {
  u64 r = 1, b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

u64 Field::inv(u64 a) const {
  if (a == 0) throw UsageError("inverse of zero");
  if (kind_ == Kind::prime) return pow(a, p_ - 2);
  // a^(2^t - 2)
  u64 r = 1, b = a;
  for (unsigned i = 1; i < t_; ++i) {
    b = mul(b, b);
    r = mul(r, b);
  }
  return r;
}

std::string Field::describe() const {
  if (kind_ == Kind::prime) return "GF(" + std::to_string(p_) + ")";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(low_));
  return "GF(2^" + std::to_string(t_) + ")/x^" + std::to_string(t_) + "+0x" + buf;
}

FieldElem make_elem(const Field& f, u64 value) {
  if (!f.contains(value)) throw UsageError("value outside field");
  return FieldElem{value, f};
}

FieldElem field_add(const FieldElem& a, const FieldElem& b) {
  if (!(a.field == b.field)) throw UsageError("field mismatch: " + a.field.describe() + " vs " + b.field.describe());
  return FieldElem{a.field.add(a.value, b.value), a.field};
}

FieldElem field_mul(const FieldElem& a, const FieldElem& b) {
  if (!(a.field == b.field)) throw UsageError("field mismatch: " + a.field.describe() + " vs " + b.field.describe());
  return FieldElem{a.field.mul(a.value, b.value), a.field};
}

// ---- WideField ----

WideField::WideField(unsigned degree) : d_(degree), w_((degree + 63) / 64), mod_(&modulus_for(degree)) {}

void WideField::mul(const u64* a, const u64* b, u64* out) const {
  Poly pa(a, a + w_), pb(b, b + w_);
  Poly r = mul_raw(pa, pb);
  reduce(r, *mod_);
  for (std::size_t i = 0; i < w_; ++i) out[i] = r[i];
}

}  // namespace fprg
