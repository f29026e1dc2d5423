#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fprg/robp.hpp"

using namespace fprg;

namespace {

// Counts of each T*D-bit output string over all INW seeds (D*T <= 20, seed <= 26 bits).
std::vector<u64> output_histogram(const INWGenerator& g) {
  std::size_t r = g.seed_bits();
  REQUIRE(r <= 26);
  std::vector<u64> hist(std::size_t{1} << (g.D() * g.T()), 0);
  std::vector<u64> blocks(g.T());
  for (u64 s = 0; s < (u64{1} << r); ++s) {
    BitString seed = BitString::from_uint(s, r);
    BitReader in(seed);
    g.expand_small(in, blocks);
    u64 key = 0;
    for (u64 b : blocks) key = (key << g.D()) | b;
    ++hist[key];
  }
  return hist;
}

std::vector<u64> unpack(u64 key, unsigned D, std::size_t T) {
  std::vector<u64> b(T);
  for (std::size_t j = T; j-- > 0;) {
    b[j] = key & ((u64{1} << D) - 1);
    key >>= D;
  }
  return b;
}

}  // namespace

TEST_CASE("robp_eval examples") {
  ROBP one;
  one.D = 3;
  one.width = {1, 1, 1};
  one.next = {std::vector<std::uint32_t>(8, 0), std::vector<std::uint32_t>(8, 0)};
  one.labels = {1.0};
  one.validate();
  std::vector<u64> in{5, 2};
  CHECK(robp_eval(one, in) == cplx(1));

  ROBP parity;
  parity.D = 1;
  parity.width = {1, 2, 2, 2, 2};
  parity.next = {{0, 1}, {0, 1, 1, 0}, {0, 1, 1, 0}, {0, 1, 1, 0}};
  parity.labels = {1.0, -1.0};
  parity.validate();
  for (u64 x = 0; x < 16; ++x) {
    std::vector<u64> bits = unpack(x, 1, 4);
    CHECK(robp_eval(parity, bits) == cplx(std::popcount(x) % 2 ? -1.0 : 1.0));
  }

  ROBP bad = parity;
  bad.next[1][2] = 5;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("an 8-bit phase accumulator matches the linear shape it tracks") {
  Rng rng(21);
  std::vector<long long> w(10);
  for (auto& v : w) v = uniform_int(rng, 0, 255);
  // phases are exact multiples of 2^-8 turns, so the program is exact
  FourierShape f = linear_shape(w, 1.0 / 256, 2);
  ROBP p = shape_to_robp(f, 8);
  CHECK(p.S() <= 8);
  for (int it = 0; it < 100; ++it) {
    std::vector<Symbol> x(10);
    for (auto& v : x) v = rng() & 1;
    std::vector<u64> blocks(x.begin(), x.end());
    REQUIRE(std::abs(robp_eval(p, blocks) - f.eval(x)) <= 1e-12);
  }
}

TEST_CASE("uniform expectation of a program matches brute force") {
  Rng rng(3);
  for (int it = 0; it < 10; ++it) {
    ROBP p = random_robp(rng, 3, 2, 4);
    cplx s = 0;
    for (u64 x = 0; x < 256; ++x) {
      std::vector<u64> b = unpack(x, 2, 4);
      s += robp_eval(p, b);
    }
    CHECK(std::abs(s / 256.0 - robp_uniform_expectation(p)) <= 1e-12);
  }
}

TEST_CASE("robp json round trip") {
  Rng rng(4);
  ROBP p = random_robp(rng, 2, 2, 3);
  ROBP q = ROBP::from_json(p.to_json());
  CHECK(q.next == p.next);
  CHECK(q.labels == p.labels);
  CHECK(q.width == p.width);
}

TEST_CASE("INW parameters") {
  INWGenerator g(2, 4, 0.1);
  CHECK(g.levels() == 2);
  CHECK(g.block_bits() == 5);  // ceil(log2(2 / 0.1)) = 5
  CHECK(g.seed_bits() == 25);
  INWGenerator h(3, 5, 0.5);
  CHECK(h.T_padded() == 8);
  CHECK(h.block_bits() == 3);
  INWGenerator wide(100, 4, 0.01);
  CHECK(wide.block_bits() == 128);
  CHECK(wide.seed_bits() == 128 * 5);
  INWGenerator bumped(60, 2, 0.1, InwHash::affine, 10);
  CHECK(bumped.block_bits() == 128);
}

TEST_CASE("INW with one block returns the seed") {
  INWGenerator g(7, 1, 0.1);
  CHECK(g.seed_bits() == 7);
  BitString seed = BitString::from_uint(0x5a, 7);
  auto out = inw_expand(g, seed);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == seed);
}

TEST_CASE("INW with the identity stub repeats the first block") {
  Rng rng(5);
  for (unsigned D : {3u, 70u}) {
    INWGenerator g(D, 2, 0.25, InwHash::identity);
    BitString seed = random_bits(rng, g.seed_bits());
    auto out = inw_expand(g, seed);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == out[1]);
    CHECK(out[0].size() == D);
  }
}

TEST_CASE("INW blocks are exactly uniform marginally") {
  for (auto [D, T, delta] : {std::tuple{2u, std::size_t{4}, 0.25}, {1u, 8, 0.5}, {4u, 2, 0.5}, {3u, 3, 0.5}}) {
    INWGenerator g(D, T, delta);
    auto hist = output_histogram(g);
    for (std::size_t j = 0; j < T; ++j) {
      std::vector<u64> marg(std::size_t{1} << D, 0);
      for (u64 key = 0; key < hist.size(); ++key) marg[unpack(key, D, T)[j]] += hist[key];
      for (u64 c : marg) REQUIRE(c == marg[0]);
    }
  }
}

TEST_CASE("INW expansion agrees between the word and small paths") {
  Rng rng(8);
  INWGenerator g(60, 4, 0.1, InwHash::affine, 10);
  BitString seed = random_bits(rng, g.seed_bits());
  BitReader a(seed), b(seed);
  auto strings = g.expand(a);
  std::vector<u64> small(4);
  g.expand_small(b, small);
  for (std::size_t j = 0; j < 4; ++j) CHECK(strings[j].read(0, 60) == small[j]);
}

TEST_CASE("INW fools random width-4 programs") {
  INWGenerator g(2, 4, 0.25);
  auto hist = output_histogram(g);
  double total = static_cast<double>(u64{1} << g.seed_bits());
  Rng rng(99);
  double worst = 0;
  for (int it = 0; it < 50; ++it) {
    ROBP p = random_robp(rng, 2, 2, 4);
    cplx e = 0;
    for (u64 key = 0; key < hist.size(); ++key)
      if (hist[key]) e += static_cast<double>(hist[key]) * robp_eval(p, unpack(key, 2, 4));
    worst = std::max(worst, std::abs(e / total - robp_uniform_expectation(p)));
  }
  CHECK(worst <= 0.25);
}

TEST_CASE("shape programs") {
  ROBP c = shape_to_robp(FourierShape::constant(4, 3), 12);
  for (cplx v : c.labels) CHECK(std::abs(v - cplx(1)) <= 1e-15);

  std::vector<long long> ones(4, 1);
  ROBP par = shape_to_robp(linear_shape(ones, 0.5, 2), 10);
  for (u64 x = 0; x < 16; ++x) {
    std::vector<u64> bits = unpack(x, 1, 4);
    CHECK(std::abs(robp_eval(par, bits) - cplx(std::popcount(x) % 2 ? -1.0 : 1.0)) <= 1e-12);
  }

  Rng rng(31);
  for (int it = 0; it < 5; ++it) {
    FourierShape f = random_shape(rng, 2, 6);
    ROBP p = shape_to_robp(f, 16);
    double worst = 0;
    for (u64 x = 0; x < 64; ++x) {
      std::vector<u64> b = unpack(x, 1, 6);
      std::vector<Symbol> sym(b.begin(), b.end());
      worst = std::max(worst, std::abs(robp_eval(p, b) - f.eval(sym)));
    }
    CHECK(worst <= 6 * std::ldexp(1.0, -14));
  }

  FourierShape g = random_shape(rng, 4, 4, ShapeKind::circle);
  ROBP p = shape_to_robp(g, 12);
  FourierShape d = discretize_shape(g, 12);
  for (u64 x = 0; x < 256; ++x) {
    std::vector<u64> b = unpack(x, 2, 4);
    std::vector<Symbol> sym(b.begin(), b.end());
    REQUIRE(std::abs(robp_eval(p, b) - d.eval(sym)) <= 1e-9);
    REQUIRE(std::abs(robp_eval(p, b) - g.eval(sym)) <= (std::numbers::pi + 0.35) * 4 * std::ldexp(1.0, -12));
  }
}

TEST_CASE("zero entries go to the absorbing zero state") {
  std::vector<cplx> t{1.0, 0.0, cplx(0, 1), -1.0, 0.5, 1e-9};
  FourierShape f(2, 3, t);
  ROBP p = shape_to_robp(f, 8);
  for (u64 x = 0; x < 8; ++x) {
    std::vector<u64> b = unpack(x, 1, 3);
    std::vector<Symbol> sym(b.begin(), b.end());
    cplx want = f.eval(sym);
    if (std::abs(want) < 1e-6)
      CHECK(robp_eval(p, b) == cplx(0));
    else
      CHECK(std::abs(robp_eval(p, b) - want) <= (std::numbers::pi + 0.35) * 3 * std::ldexp(1.0, -8));
  }
}

TEST_CASE("discretization at precision 2 log2(n/delta) is pointwise delta-close") {
  Rng rng(12);
  for (double delta : {0.2, 0.05, 0.01}) {
    for (std::size_t n = 1; n <= 8; ++n) {
      FourierShape f = random_shape(rng, 2, n);
      unsigned P = default_precision(n, delta);
      FourierShape d = discretize_shape(f, P);
      for (u64 x = 0; x < (u64{1} << n); ++x) {
        std::vector<Symbol> sym(n);
        for (std::size_t j = 0; j < n; ++j) sym[j] = (x >> j) & 1;
        REQUIRE(std::abs(f.eval(sym) - d.eval(sym)) <= delta);
      }
    }
  }
}
