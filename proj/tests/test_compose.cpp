#include <cmath>
#include <functional>

#include "doctest.h"
#include "fprg/compose.hpp"
#include "fprg/harness.hpp"
#include "oracles.hpp"

using namespace fprg;

namespace {

// Independent walk of a serialized tree: local bits of every node.
std::size_t walk(const json& t) {
  std::size_t r = t.at("local_bits").get<std::size_t>();
  if (t.contains("children"))
    for (const json& c : t.at("children")) r += walk(c);
  return r;
}

ComposeKnobs small_n0() {
  ComposeKnobs k;
  k.n0 = 4;
  return k;
}

}  // namespace

TEST_CASE("knobs parse and round trip") {
  ComposeKnobs k;
  k.set("n0", "16");
  k.set("C", "3.5");
  k.set("p", "4");
  k.set("delta_map", "0.01");
  CHECK(k.n0 == 16);
  CHECK(k.C == 3.5);
  ComposeKnobs r = ComposeKnobs::from_json(k.to_json());
  CHECK(r.to_json() == k.to_json());
  CHECK_THROWS_AS(k.set("nope", "1"), UsageError);
  CHECK_THROWS_AS(k.set("p", "x"), UsageError);
  CHECK_THROWS_AS(k.set("n0", "0"), UsageError);
  CHECK_THROWS_AS(k.set("p", "1.5"), UsageError);
}

TEST_CASE("level delta") {
  CHECK(level_delta(2, 0.1) == doctest::Approx(0.025));
  CHECK(level_delta(16, 0.1) == doctest::Approx(0.0125));   // log2 log2 16 = 2
  CHECK(level_delta(65536, 0.01) == doctest::Approx(0.000625));  // 4 levels of log log
  CHECK(recursion_depth(64, 64) == 0);
  CHECK(recursion_depth(65536, 64) == 2);
  CHECK(recursion_depth(4096, 64) == 1);
}

TEST_CASE("n <= n0 gives one inw-base node") {
  for (std::size_t n : {1, 8, 12, 64}) {
    Plan p = build_plan(Alphabet::of(2), n, 0.1);
    CHECK(p.root->kind() == "inw-base");
    CHECK(p.root->children().empty());
  }
  Plan p = build_plan(Alphabet::of(2), 8, 0.1);
  auto& b = dynamic_cast<const InwBase&>(*p.root);
  // T = 2 blocks of 4 bits, one INW level: 4 (1 + 2) bits
  CHECK(b.per_block() == 4);
  CHECK(b.inw().T() == 2);
  CHECK(b.inw().block_bits() == 4);
  CHECK(p.seed_bits() == 12);
  CHECK(b.state_bits() == 2 * 10);
}

TEST_CASE("m = 2, n = 2^16, eps = 0.01: depth 2 and r < n") {
  Plan p = build_plan(Alphabet::of(2), 65536, 0.01);
  REQUIRE(p.root->kind() == "xor-compose");
  auto ch = p.root->children();
  CHECK(ch[0]->kind() == "glarge");
  REQUIRE(ch[1]->kind() == "dim-step");
  auto& d = dynamic_cast<const DimStep&>(*ch[1]);
  CHECK(d.t() == 256);
  CHECK(d.k() == 7);
  CHECK(d.r0() == 7 * 16);

  // walk down the dim-step spine counting levels above n0
  std::size_t depth = 0;
  std::function<void(const json&)> spine = [&](const json& t) {
    std::string k = t.at("kind");
    if (k == "dim-step") ++depth;
    if (t.contains("children"))
      for (const json& c : t.at("children"))
        if (c.at("kind") != "glarge") spine(c);
  };
  json tree = p.root->to_json();
  spine(tree);
  CHECK(depth == 2);
  CHECK(depth == recursion_depth(65536, 64));
  CHECK(walk(tree) == p.seed_bits());
  CHECK(p.seed_bits() < 65536);
  MESSAGE("r(2, 2^16, 0.01) = " << p.seed_bits());
}

TEST_CASE("seed length is monotone in eps") {
  for (auto [m, n] : {std::pair<u64, std::size_t>{2, 8}, {2, 100}, {2, 4096}, {16, 300}, {3, 50}, {1000, 70}}) {
    std::size_t prev = 0;
    for (double eps : {0.2, 0.1, 0.05, 0.01}) {
      std::size_t r = build_plan(Alphabet::of(m), n, eps).seed_bits();
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("seed length examples") {
  UniformStub u(Alphabet::of(5), 7);
  CHECK(seed_length(u) == 7 * 3);
  auto a = std::make_shared<UniformStub>(Alphabet::of(4), 3);
  auto b = std::make_shared<KWiseGen>(Alphabet::of(4), 3, 2);
  XorCompose x(a, b);
  CHECK(seed_length(x) == a->seed_bits() + b->seed_bits());

  Plan p = build_plan(Alphabet::of(2), 256, 0.05);
  json doc = p.to_json();
  CHECK(walk(doc.at("plan")) == p.seed_bits());
  CHECK(seed_length(doc) == p.seed_bits());
  CHECK(doc.at("seed_bits") == p.seed_bits());
}

TEST_CASE("generate: stubs and composition identities") {
  UniformStub u(Alphabet::of(16), 3);
  CHECK(u.generate(BitString::from_hex("a5f", 12)) == std::vector<Symbol>{10, 5, 15});
  auto base = build_generator(Alphabet::of(4), 6, 0.1);
  XorCompose x(base, std::make_shared<ConstStub>(Alphabet::of(4), 6, 0));
  Rng rng(1);
  for (int it = 0; it < 20; ++it) {
    BitString s = random_bits(rng, base->seed_bits());
    CHECK(x.generate(s) == base->generate(s));
  }
}

TEST_CASE("composed generator at m = 2, n = 8, eps = 0.1 fools 200 shapes") {
  GenPtr g = build_generator(Alphabet::of(2), 8, 0.1);
  OutputSample o = OutputSample::collect(*g, EvalMode::enumerate());
  Rng rng(2);
  double worst = 0;
  for (int it = 0; it < 200; ++it) {
    FourierShape f = random_shape(rng, 2, 8);
    worst = std::max(worst, std::abs(o.expect(f).value - uniform_expectation(f)));
  }
  CHECK(worst <= 0.1);
}

TEST_CASE("tvar is invariant under every shift") {
  Rng rng(3);
  for (auto [m, n] : {std::pair<u64, std::size_t>{2, 6}, {3, 5}, {4, 4}}) {
    FourierShape f = random_shape(rng, m, n);
    double t = tvar(f);
    oracle::for_each_vector(m, n, [&](const std::vector<Symbol>& z) { CHECK(tvar(shifted(f, z)) == doctest::Approx(t).epsilon(1e-13)); });
  }
}

TEST_CASE("base-case marginals are exactly uniform for power-of-two m") {
  for (auto [m, n, eps] : {std::tuple<u64, std::size_t, double>{2, 8, 0.1}, {4, 5, 0.2}, {8, 3, 0.3}}) {
    GenPtr g = build_generator(Alphabet::of(m), n, eps);
    REQUIRE(g->seed_bits() <= 24);
    OutputSample o = OutputSample::collect(*g, EvalMode::enumerate(24));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<u64> marg(m, 0);
      for (std::size_t e = 0; e < o.distinct(); ++e) marg[o.output(e)[i]] += o.count(e);
      for (u64 c : marg) CHECK(c == marg[0]);
    }
  }
}

TEST_CASE("plan documents replay") {
  Plan p = build_plan(Alphabet::of(2), 8, 0.1);
  json doc = p.to_json();
  Plan q = plan_from_json(json::parse(doc.dump()));
  CHECK(q.root->to_json() == p.root->to_json());
  Rng rng(4);
  for (int it = 0; it < 10; ++it) {
    BitString s = random_bits(rng, p.seed_bits());
    CHECK(q.root->generate(s) == p.root->generate(s));
  }
  // bare trees of simple nodes
  GenPtr x = std::make_shared<XorCompose>(std::make_shared<KWiseGen>(Alphabet::of(4), 5, 3), std::make_shared<UniformStub>(Alphabet::of(4), 5));
  GenPtr y = generator_from_json(x->to_json());
  CHECK(y->to_json() == x->to_json());

  json bad = doc;
  bad["build"]["n"] = 9;
  CHECK_THROWS_AS(plan_from_json(bad), UsageError);
  json big = build_plan(Alphabet::of(2), 300, 0.1).to_json();
  CHECK(plan_from_json(big).seed_bits() == big.at("seed_bits").get<std::size_t>());
}

TEST_CASE("tiny eps is refused with the precision it needs") {
  try {
    build_plan(Alphabet::of(2), 8, 1e-12);
    FAIL("expected a refusal");
  } catch (const RefusalError& e) {
    CHECK(std::string(e.what()).find("phase bits") != std::string::npos);
  }
  CHECK_THROWS_AS(build_plan(Alphabet::of(1), 8, 0.1), UsageError);
  CHECK_THROWS_AS(build_plan(Alphabet::of(2), 8, 1.0), UsageError);
}

TEST_CASE("recursive plan with a small base case generates and fools shapes") {
  Plan p = build_plan(Alphabet::of(2), 16, 0.1, small_n0());
  REQUIRE(p.root->kind() != "inw-base");
  CHECK(walk(p.root->to_json()) == p.seed_bits());
  Rng rng(5);
  BitString s = random_bits(rng, p.seed_bits());
  CHECK(p.root->generate(s) == p.root->generate(s));

  OutputSample o = OutputSample::collect(*p.root, EvalMode::sample(20000, 6));
  // per-coordinate frequencies close to 1/2
  for (std::size_t i = 0; i < 16; ++i) {
    Estimate e = o.probability([i](std::span<const Symbol> x) { return x[i] == 1; });
    CHECK(std::abs(e.value.real() - 0.5) <= 4 * e.std_err + 1e-9);
  }
  for (int it = 0; it < 20; ++it) {
    FourierShape f = random_shape(rng, 2, 16);
    Estimate e = o.expect(f);
    CHECK(std::abs(e.value - uniform_expectation(f)) <= 0.1 + 3 * e.std_err);
  }
}

TEST_CASE("large alphabets are reduced before the first level") {
  Plan p = build_plan(Alphabet::pow2(100), 100, 0.1);
  CHECK(p.root->kind() == "alphabet-step");
  CHECK(walk(p.root->to_json()) == p.seed_bits());
  CHECK_THROWS_AS(p.root->generate(BitString(p.seed_bits())), RefusalError);
}

TEST_CASE("the high-variance generator joins a level when tau_hv allows it") {
  ComposeKnobs k = small_n0();
  k.tau_hv = 0;
  Plan p = build_plan(Alphabet::of(2), 16, 0.1, k);
  REQUIRE(p.root->kind() == "xor-compose");
  CHECK(p.root->children()[0]->kind() == "glarge");
  CHECK(walk(p.root->to_json()) == p.seed_bits());
  OutputSample o = OutputSample::collect(*p.root, EvalMode::sample(20000, 7));
  Rng rng(8);
  for (int it = 0; it < 20; ++it) {
    FourierShape f = random_shape(rng, 2, 16, ShapeKind::balanced);
    Estimate e = o.expect(f);
    CHECK(std::abs(e.value - uniform_expectation(f)) <= 0.1 + 3 * e.std_err);
  }
  CHECK(build_plan(Alphabet::of(2), 16, 0.1, small_n0()).root->kind() == "dim-step");
}
