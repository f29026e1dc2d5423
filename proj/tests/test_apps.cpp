#include <cmath>

#include "doctest.h"
#include "fprg/apps.hpp"
#include "oracles.hpp"

using namespace fprg;

namespace {

Halfspace majority(std::size_t n) { return {std::vector<long long>(n, 1), static_cast<long long>((n + 1) / 2)}; }

double uniform_prob(u64 m, std::size_t n, const std::function<bool(std::span<const Symbol>)>& f) {
  double hits = 0, total = 0;
  oracle::for_each_vector(m, n, [&](const std::vector<Symbol>& x) {
    hits += f(x) ? 1 : 0;
    total += 1;
  });
  return hits / total;
}

}  // namespace

TEST_CASE("halfspace: trivial cases") {
  GenPtr g = build_generator(Alphabet::of(2), 8, 0.1);
  Halfspace always{{3, -2, 5, 1, 0, -7, 2, 2}, 0};
  long long l1 = 0;
  for (long long w : always.w) l1 += std::llabs(w);
  always.theta = -l1 - 1;
  AppError e = halfspace_error(*g, always, EvalMode::enumerate());
  CHECK(e.error == 0);
  CHECK(e.uniform == doctest::Approx(1.0));
  CHECK(e.exact);

  UniformStub u(Alphabet::of(2), 3);
  AppError maj = halfspace_error(u, majority(3), EvalMode::enumerate());
  CHECK(maj.error == 0);
  CHECK(maj.uniform == doctest::Approx(0.5));
}

TEST_CASE("halfspace: uniform side matches brute force") {
  Rng rng(21);
  for (int it = 0; it < 10; ++it) {
    Halfspace h = random_halfspace(rng, 8, 8);
    UniformStub u(Alphabet::of(2), 8);
    AppError e = halfspace_error(u, h, EvalMode::enumerate());
    CHECK(e.uniform == doctest::Approx(uniform_prob(2, 8, [&](std::span<const Symbol> x) { return h.eval(x); })));
    CHECK(e.error <= 1e-12);
  }
}

TEST_CASE("halfspace: composed generator at n = 12, eps = 0.05") {
  GenPtr g = build_generator(Alphabet::of(2), 12, 0.05);
  REQUIRE(g->seed_bits() <= 26);
  OutputSample o = OutputSample::collect(*g, EvalMode::enumerate());
  Rng rng(22);
  double worst = 0;
  for (int it = 0; it < 100; ++it) worst = std::max(worst, halfspace_error(o, random_halfspace(rng, 12, 12)).error);
  CHECK(worst <= 0.05);
  MESSAGE("worst halfspace error " << worst);
}

TEST_CASE("halfspace error is bounded by d_K on every threshold") {
  GenPtr g = build_generator(Alphabet::of(2), 10, 0.1);
  OutputSample o = OutputSample::collect(*g, EvalMode::enumerate());
  Rng rng(23);
  for (int it = 0; it < 10; ++it) {
    Halfspace h = random_halfspace(rng, 10, 10);
    IntPMF uni = linear_pmf(h.w, 2);
    std::vector<std::vector<long long>> G;
    for (long long w : h.w) G.push_back({0, w});
    IntPMF gen = output_sum_pmf(o, G);
    double dk = d_k(uni, gen);
    for (long long th = uni.lo - 1; th <= uni.hi() + 1; ++th) {
      h.theta = th;
      CHECK(halfspace_error(o, h).error <= dk + 1e-12);
    }
  }
}

TEST_CASE("halfspace: window refusal") {
  UniformStub u(Alphabet::of(2), 4);
  Halfspace h{{1'000'000, 1'000'000, 1'000'000, 1'000'000}, 0};
  CHECK_THROWS_AS(halfspace_error(u, h, EvalMode::enumerate()), RefusalError);
  CHECK_THROWS_AS(halfspace_error(UniformStub(Alphabet::of(4), 2), Halfspace{{1, 1}, 1}, EvalMode::enumerate()), UsageError);
}

TEST_CASE("generalized halfspace: canonical form agrees pointwise") {
  Rng rng(24);
  for (int it = 0; it < 20; ++it) {
    u64 m = 2 + uniform_below(rng, 3);
    std::size_t n = 1 + uniform_below(rng, 6);
    while (std::pow(static_cast<double>(m), static_cast<double>(n)) > 5000) --n;
    GeneralizedHalfspace gh;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(m);
      // reals with no short binary expansion force the rounding path
      for (double& v : row) v = 10 * uniform01(rng) - 5 + (it % 2 ? 0.1 : 0.0);
      gh.g.push_back(row);
    }
    gh.theta = 0.3 * static_cast<double>(n);
    IntegerTables t = gh.canonical();
    Halfspace bin = gh.embed_binary();
    oracle::for_each_vector(m, n, [&](const std::vector<Symbol>& x) {
      CHECK(t.eval(x) == gh.eval(x));
      CHECK(bin.eval(one_hot(x, m)) == gh.eval(x));
    });
  }
  // exact scaling of dyadic entries
  GeneralizedHalfspace d{{{0.5, 1.25}, {-0.75, 2.0}}, 1.0};
  IntegerTables t = d.canonical();
  CHECK(t.G[0] == std::vector<long long>{0, 3});
  CHECK(t.G[1] == std::vector<long long>{0, 11});
  oracle::for_each_vector(2, 2, [&](const std::vector<Symbol>& x) { CHECK(t.eval(x) == d.eval(x)); });
  // equality on the threshold must count as accepted
  GeneralizedHalfspace eq{{{0.0, 1.0}}, 1.0};
  CHECK(eq.canonical().eval(std::vector<Symbol>{1}));
}

TEST_CASE("generalized halfspace: trivial cases and m = 2 embedding") {
  GenPtr g4 = build_generator(Alphabet::of(4), 8, 0.1);
  OutputSample o4 = OutputSample::collect(*g4, EvalMode::enumerate());
  GeneralizedHalfspace zero{std::vector<std::vector<double>>(8, std::vector<double>(4, 0.0)), 1.0};
  AppError z = gen_halfspace_error(o4, zero);
  CHECK(z.error == 0);
  CHECK(z.generator == 0);
  CHECK(z.uniform == 0);

  GenPtr g2 = build_generator(Alphabet::of(2), 10, 0.1);
  OutputSample o2 = OutputSample::collect(*g2, EvalMode::enumerate());
  Rng rng(25);
  for (int it = 0; it < 20; ++it) {
    Halfspace h = random_halfspace(rng, 10, 10);
    AppError a = halfspace_error(o2, h), b = gen_halfspace_error(o2, GeneralizedHalfspace::from(h));
    CHECK(a.error == doctest::Approx(b.error));
    CHECK(a.uniform == doctest::Approx(b.uniform));
  }
}

TEST_CASE("generalized halfspace: m = 4, n = 8 random instances") {
  const double eps = 0.1;
  GenPtr g = build_generator(Alphabet::of(4), 8, eps);
  OutputSample o = OutputSample::collect(*g, EvalMode::enumerate());
  Rng rng(26);
  double worst = 0;
  for (int it = 0; it < 50; ++it) worst = std::max(worst, gen_halfspace_error(o, random_gen_halfspace(rng, 4, 8, 8)).error);
  CHECK(worst <= eps);
}

TEST_CASE("modular tests") {
  GenPtr g = build_generator(Alphabet::of(2), 10, 0.1);
  OutputSample o = OutputSample::collect(*g, EvalMode::enumerate());
  ModularTest zero{std::vector<long long>(10, 0), 5, {0, 2}};
  CHECK(modular_error(o, zero).error == 0);

  ModularTest parity{std::vector<long long>(10, 1), 2, {1}};
  Estimate bias = o.expect([](std::span<const Symbol> x) {
    int s = 0;
    for (Symbol b : x) s ^= static_cast<int>(b);
    return cplx(s ? -1.0 : 1.0);
  });
  CHECK(modular_error(o, parity).error == doctest::Approx(std::abs(bias.value.real()) / 2));

  Rng rng(27);
  double worst = 0;
  for (int it = 0; it < 50; ++it) {
    ModularTest t = random_modular(rng, 10, 6);
    AppError e = modular_error(o, t);
    double direct = uniform_prob(2, 10, [&](std::span<const Symbol> x) { return t.eval(x); });
    CHECK(e.uniform == doctest::Approx(direct));
    worst = std::max(worst, e.error);
  }
  CHECK(worst <= 0.1);
}

TEST_CASE("combinatorial shapes") {
  const double eps = 0.2;
  GenPtr g = build_generator(Alphabet::of(3), 9, eps);
  OutputSample o = OutputSample::collect(*g, EvalMode::sample(20000, 3));
  Rng rng(28);
  CombinatorialShape one = random_comb_shape(rng, 3, 9);
  std::fill(one.h.begin(), one.h.end(), 1);
  CHECK(comb_shape_error(o, one).error <= 1e-12);

  CombinatorialShape rect = random_comb_shape(rng, 3, 9);
  std::fill(rect.h.begin(), rect.h.end(), 0);
  rect.h[9] = 1;
  std::fill(rect.g[4].begin(), rect.g[4].end(), 0);
  AppError r = comb_shape_error(o, rect);
  CHECK(r.generator == 0);
  CHECK(r.uniform == 0);

  for (int it = 0; it < 20; ++it) {
    CombinatorialShape c = random_comb_shape(rng, 3, 9);
    AppError e = comb_shape_error(o, c);
    if (it < 3) CHECK(e.uniform == doctest::Approx(uniform_prob(3, 9, [&](std::span<const Symbol> x) { return c.eval(x); })));
    CHECK(e.error <= eps + 3 * e.std_err);
  }
}

TEST_CASE("instance documents round trip") {
  Rng rng(29);
  Halfspace h = random_halfspace(rng, 5, 4);
  CHECK(Halfspace::from_json(h.to_json()).w == h.w);
  GeneralizedHalfspace gh = random_gen_halfspace(rng, 3, 4, 4);
  CHECK(GeneralizedHalfspace::from_json(gh.to_json()).to_json() == gh.to_json());
  ModularTest t = random_modular(rng, 6, 5);
  CHECK(ModularTest::from_json(t.to_json()).to_json() == t.to_json());
  CombinatorialShape c = random_comb_shape(rng, 3, 4);
  CHECK(CombinatorialShape::from_json(c.to_json()).to_json() == c.to_json());
  CHECK_THROWS_AS(ModularTest::from_json(json{{"a", {1}}, {"M", 1}, {"S", json::array()}}), UsageError);
  CHECK_THROWS_AS(Halfspace::from_json(json{{"w", "x"}}), UsageError);
}

TEST_CASE("quantization: largest remainder") {
  std::vector<double> p{0.3, 0.3, 0.4};
  std::vector<u64> c = quantize(p, 3);  // 2.4, 2.4, 3.2 -> remainders .4 .4 .2
  CHECK(c == std::vector<u64>{3, 2, 3});
  Rng rng(30);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> q(1 + uniform_below(rng, 10));
    for (double& x : q) x = uniform01(rng);
    unsigned bits = 1 + static_cast<unsigned>(uniform_below(rng, 20));
    std::vector<u64> k = quantize(q, bits);
    u64 s = 0;
    for (u64 x : k) s += x;
    CHECK(s == (u64{1} << bits));
  }
}

TEST_CASE("chernoff sampler: mapping cases") {
  CHECK(ChernoffSampler::default_bits(2, 8, 0.1) == 8);  // ceil(log2 160)

  std::vector<std::vector<double>> point(4, {0.0, 0.0, 1.0});
  ChernoffSampler s = ChernoffSampler::build(point, 0.2);
  Rng rng(31);
  for (int it = 0; it < 10; ++it) CHECK(s.sample(random_bits(rng, s.seed_bits())) == std::vector<Symbol>(4, 2));

  std::vector<std::vector<double>> uni(3, std::vector<double>(4, 0.25));
  ChernoffSampler u = ChernoffSampler::build(uni, 0.2, {}, 5);
  for (Symbol z = 0; z < 32; ++z) CHECK(u.map(1, z) == z >> 3);
}

TEST_CASE("chernoff sampler: biased coins have exact marginals") {
  std::vector<std::vector<double>> coins(8, {0.75, 0.25});
  ChernoffSampler s = ChernoffSampler::build(coins, 0.1, {}, 2);
  REQUIRE(s.seed_bits() <= 26);
  std::vector<u64> ones(8, 0);
  u64 total = 0;
  const std::size_t r = s.seed_bits();
  for (u64 i = 0; i < (u64{1} << r); ++i) {
    BitString seed;
    seed.assign_uint(i, r);
    std::vector<Symbol> y = s.sample(seed);
    for (std::size_t j = 0; j < 8; ++j) ones[j] += y[j];
    ++total;
  }
  for (u64 c : ones) CHECK(static_cast<double>(c) / static_cast<double>(total) == 0.25);
}

TEST_CASE("chernoff tail check") {
  std::vector<std::vector<double>> fair(64, {0.5, 0.5});
  ChernoffSampler s = ChernoffSampler::build(fair, 0.1);
  std::vector<std::vector<double>> pm(64, {-1.0, 1.0});
  TailReport t0 = chernoff_tail_check(s, pm, 0, 100);
  CHECK(t0.pass);
  std::vector<std::vector<double>> zero(64, {0.0, 0.0});
  TailReport tz = chernoff_tail_check(s, zero, 1, 500);
  CHECK(tz.tail == 0);
  TailReport t16 = chernoff_tail_check(s, pm, 16, 5000, 7);
  CHECK(t16.bound == doctest::Approx(2 * std::exp(-2.0) + 0.1));
  CHECK(t16.pass);
  MESSAGE("tail at t = 16: " << t16.tail << " bound " << t16.bound);
}
