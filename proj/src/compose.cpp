// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/compose.hpp"

#include <cmath>
#include <functional>

namespace fprg {

// ---- knobs ----

json ComposeKnobs::to_json() const {
  return {{"n0", n0}, {"tau_hv", tau_hv}, {"c_T", c_T}, {"C", C}, {"p", p}, {"delta_rec", delta_rec},
          {"delta_map", delta_map}, {"inw_extra", inw_extra}, {"precision_cap", precision_cap}};
}

ComposeKnobs ComposeKnobs::from_json(const json& j) {
  ComposeKnobs k;
  for (auto& [key, v] : j.items()) k.set(key, v.is_string() ? v.get<std::string>() : v.dump());
  return k;
}

namespace {

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("knob " + key + " needs a number, got '" + v + "'");
  }
}

unsigned long long parse_count(const std::string& key, const std::string& v) {
  double x = parse_real(key, v);
  if (x < 0 || x != std::floor(x) || x > 1e15) throw UsageError("knob " + key + " needs a non-negative integer, got '" + v + "'");
  return static_cast<unsigned long long>(x);
}

}  // namespace

void ComposeKnobs::set(const std::string& key, const std::string& value) {
  if (key == "n0") {
    n0 = parse_count(key, value);
    if (n0 == 0) throw UsageError("n0 must be positive");
  } else if (key == "tau_hv") {
    tau_hv = parse_real(key, value);
  } else if (key == "c_T") {
    c_T = parse_real(key, value);
  } else if (key == "C") {
    C = parse_real(key, value);
    if (!(C > 0)) throw UsageError("C must be positive");
  } else if (key == "p") {
    p = static_cast<unsigned>(parse_count(key, value));
    if (p == 0) throw UsageError("p must be positive");
  } else if (key == "delta_rec") {
    delta_rec = parse_real(key, value);
    if (!(delta_rec > 0 && delta_rec < 1)) throw UsageError("delta_rec must be in (0,1)");
  } else if (key == "delta_map") {
    delta_map = parse_real(key, value);
    if (!(delta_map >= 0 && delta_map < 1)) throw UsageError("delta_map must be in [0,1)");
  } else if (key == "inw_extra") {
    inw_extra = static_cast<unsigned>(parse_count(key, value));
  } else if (key == "precision_cap") {
    precision_cap = static_cast<unsigned>(parse_count(key, value));
  } else {
    throw UsageError("unknown knob '" + key + "'");
  }
}

// ---- base case ----

InwBase::InwBase(Alphabet m, std::size_t n, double delta, std::size_t n0, unsigned extra_bits, double delta_map,
                 unsigned precision_cap)
    : Generator(m, n), delta_(delta), delta_map_(delta_map), n0_(n0) {
  if (n == 0) throw UsageError("inw-base needs n >= 1");
  if (!(delta > 0 && delta < 1)) throw UsageError("inw-base error must be in (0,1)");
  S_ = default_precision(std::max(n0, n), delta);
  if (S_ > precision_cap)
    throw RefusalError("error " + std::to_string(delta) + " needs " + std::to_string(S_) + " phase bits in the base case; the budget is " +
                       std::to_string(precision_cap));
  b_ = fprg::symbol_bits(m, n, delta_map);
  const std::size_t e0 = static_cast<std::size_t>(std::ceil(std::log2(1 / delta) - 1e-12));
  const std::size_t b = std::max(1u, b_);
  auto make = [&](std::size_t T) {
    return INWGenerator(static_cast<unsigned>(ceil_div(n, T) * b), T, delta, InwHash::affine, extra_bits);
  };
  std::size_t best = n == 1 ? 1 : 2;
  inw_ = make(best);
  for (std::size_t T = 4; T / 2 < n; T *= 2) {
    if (ceil_div(n, T) * b < e0) break;
    INWGenerator g = make(T);
    if (g.seed_bits() < inw_.seed_bits()) {
      inw_ = g;
      best = T;
    }
  }
  c_ = ceil_div(n, best);
}

void InwBase::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  std::vector<BitString> blocks = inw_.expand(in);
  if (b_ == 0) {
    std::fill(out.begin(), out.end(), 0);
    return;
  }
  std::size_t i = 0;
  for (const BitString& blk : blocks) {
    BitReader r(blk);
    for (std::size_t j = 0; j < c_ && i < out.size(); ++j) out[i++] = symbol_from_bits(r.take(b_), alphabet());
  }
}

json InwBase::params() const {
  return {{"delta", delta_}, {"delta_map", delta_map_}, {"n0", n0_}, {"symbol_bits", b_}, {"per_block", c_},
          {"state_bits", S_}, {"inw", inw_.to_json()}};
}

// ---- planner ----

double level_delta(std::size_t n, double eps) {
  double ll = n > 2 ? std::ceil(std::log2(std::log2(static_cast<double>(n))) - 1e-12) : 1.0;
  return eps / (4 * std::max(1.0, ll));
}

std::size_t recursion_depth(std::size_t n, std::size_t n0) {
  std::size_t d = 0;
  while (n > n0) {
    n = DimStep::bucket_count(n);
    ++d;
  }
  return d;
}

namespace {

struct Planner {
  ComposeKnobs k;
  double delta;
  double delta_map;

  GenPtr base(Alphabet m, std::size_t n) const {
    auto g = std::make_shared<InwBase>(m, n, delta, k.n0, k.inw_extra, delta_map, k.precision_cap);
    g->set_eps(delta);
    return g;
  }

  GenPtr level(Alphabet m, std::size_t n) const {
    if (n <= k.n0) return base(m, n);
    AlphabetStepParams ap;
    ap.C = k.C;
    ap.delta_map = delta_map;
    DimStepParams dp;
    dp.C = k.C;
    dp.delta_map = delta_map;
    GenFactory lv = [this](Alphabet a, std::size_t t) { return level(a, t); };
    GenFactory inner = [this, ap, lv](Alphabet a, std::size_t t) { return alphabet_reduce(a, t, delta, lv, ap); };
    auto small = std::make_shared<DimStep>(m, n, delta, inner, dp);
    small->set_eps(delta);
    if (static_cast<double>(n) < k.tau_hv) return small;
    GLargeParams gp;
    gp.c_T = k.c_T;
    gp.delta_map = delta_map;
    gp.g1.p = k.p;
    gp.g1.delta_rec = k.delta_rec;
    gp.g1.delta_map = delta_map;
    auto large = std::make_shared<GLarge>(m, n, delta, gp);
    large->set_eps(delta);
    auto x = std::make_shared<XorCompose>(large, small);
    x->set_eps(4 * delta);
    return x;
  }
};

}  // namespace

Plan build_plan(Alphabet m, std::size_t n, double eps, const ComposeKnobs& knobs) {
  if (m.is_pow2() ? m.bits() < 1 : m.size() < 2) throw UsageError("alphabet size must be at least 2");
  if (n == 0) throw UsageError("n must be at least 1");
  if (!(eps > 0 && eps < 1)) throw UsageError("eps must be in (0,1)");
  Plan plan;
  plan.m = m;
  plan.n = n;
  plan.eps = eps;
  plan.knobs = knobs;
  Planner pl{knobs, level_delta(n, eps), knobs.delta_map > 0 ? knobs.delta_map : eps / 10};
  if (n <= knobs.n0) {
    pl.delta = eps;
    plan.root = pl.base(m, n);
  } else {
    AlphabetStepParams ap;
    ap.C = knobs.C;
    ap.delta_map = pl.delta_map;
    plan.root = alphabet_reduce(m, n, pl.delta, [&pl](Alphabet a, std::size_t t) { return pl.level(a, t); }, ap);
  }
  std::const_pointer_cast<Generator>(plan.root)->set_eps(eps);
  return plan;
}

GenPtr build_generator(Alphabet m, std::size_t n, double eps, const ComposeKnobs& knobs) { return build_plan(m, n, eps, knobs).root; }

json Plan::to_json() const {
  return {{"format", "fprg-plan/1"},
          {"build", {{"m", m.to_string()}, {"n", n}, {"eps", eps}, {"knobs", knobs.to_json()}}},
          {"seed_bits", seed_bits()},
          {"plan", root->to_json()}};
}

GenPtr generator_from_json(const json& t) {
  std::string kind = t.at("kind").get<std::string>();
  Alphabet m = Alphabet::parse(t.at("m").get<std::string>());
  std::size_t n = t.at("n").get<std::size_t>();
  json p = t.value("params", json::object());
  GenPtr g;
  if (kind == "uniform-stub") {
    g = std::make_shared<UniformStub>(m, n);
  } else if (kind == "const-stub") {
    g = std::make_shared<ConstStub>(m, n, p.at("value").get<Symbol>());
  } else if (kind == "kwise") {
    g = std::make_shared<KWiseGen>(m, n, p.at("k").get<unsigned>(), p.at("delta_map").get<double>());
  } else if (kind == "small-bias-lift") {
    g = std::make_shared<SmallBiasLift>(m, n, p.at("delta").get<double>(), p.at("delta_map").get<double>());
  } else if (kind == "xor-compose") {
    const json& ch = t.at("children");
    if (ch.size() != 2) throw UsageError("xor-compose needs two children");
    g = std::make_shared<XorCompose>(generator_from_json(ch[0]), generator_from_json(ch[1]));
  } else if (kind == "inw-base") {
    const json& inw = p.at("inw");
    g = std::make_shared<InwBase>(m, n, p.at("delta").get<double>(), p.at("n0").get<std::size_t>(), inw.at("extra_bits").get<unsigned>(),
                                  p.at("delta_map").get<double>(), 1000);
  } else {
    throw UsageError("cannot rebuild a bare '" + kind + "' node; use a plan document with a build record");
  }
  if (t.contains("eps")) std::const_pointer_cast<Generator>(g)->set_eps(t.at("eps").get<double>());
  if (g->to_json() != t) throw UsageError("plan node '" + kind + "' does not match its rebuilt form");
  return g;
}

Plan plan_from_json(const json& doc) {
  if (!doc.contains("build")) {
    Plan p;
    p.root = generator_from_json(doc.contains("plan") ? doc.at("plan") : doc);
    p.m = p.root->alphabet();
    p.n = p.root->n();
    p.eps = p.root->eps();
    return p;
  }
  const json& b = doc.at("build");
  Plan p = build_plan(Alphabet::parse(b.at("m").get<std::string>()), b.at("n").get<std::size_t>(), b.at("eps").get<double>(),
                      ComposeKnobs::from_json(b.at("knobs")));
  if (doc.contains("plan") && doc.at("plan") != p.root->to_json()) throw UsageError("plan tree does not match its build record");
  if (doc.contains("seed_bits") && doc.at("seed_bits").get<std::size_t>() != p.seed_bits())
    throw UsageError("plan seed_bits does not match its build record");
  return p;
}

std::size_t seed_length(const Generator& g) { return g.seed_bits(); }
std::size_t seed_length(const json& tree) { return seed_bits_from_json(tree.contains("plan") ? tree.at("plan") : tree); }

}  // namespace fprg
