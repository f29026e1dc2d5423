// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/robp.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace fprg {

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr std::size_t kMaxShapeWidth = std::size_t{1} << 22;
}  // namespace

// ---- ROBP ----

unsigned ROBP::S() const {
  std::size_t w = 1;
  for (std::size_t x : width) w = std::max(w, x);
  return ceil_log2(w);
}

void ROBP::validate() const {
  if (D > 20) throw UsageError("ROBP reads at most 20 bits per step");
  if (width.size() != next.size() + 1) throw UsageError("ROBP needs T+1 layer widths");
  if (width[0] != 1) throw UsageError("ROBP layer 0 must have exactly one start state");
  std::size_t fan = std::size_t{1} << D;
  for (std::size_t t = 0; t < next.size(); ++t) {
    if (next[t].size() != width[t] * fan) throw UsageError("ROBP layer " + std::to_string(t) + " has the wrong number of edges");
    for (std::uint32_t s : next[t])
      if (s >= width[t + 1]) throw UsageError("ROBP edge leaves the next layer");
  }
  if (labels.size() != width.back()) throw UsageError("ROBP needs one label per final state");
  for (const cplx& v : labels)
    if (!(std::abs(v) <= 1 + 1e-12)) throw UsageError("ROBP labels must lie in the unit disk");
}

json ROBP::to_json() const {
  json layers = json::array();
  for (std::size_t t = 0; t < next.size(); ++t) layers.push_back({{"width", width[t]}, {"next", next[t]}});
  json lab = json::array();
  for (const cplx& v : labels) lab.push_back({v.real(), v.imag()});
  return json{{"D", D}, {"T", T()}, {"S", S()}, {"layers", layers}, {"final_width", width.back()}, {"labels", lab}};
}

ROBP ROBP::from_json(const json& j) {
  ROBP p;
  p.D = j.at("D").get<unsigned>();
  p.width.clear();
  for (const json& l : j.at("layers")) {
    p.width.push_back(l.at("width").get<std::size_t>());
    p.next.push_back(l.at("next").get<std::vector<std::uint32_t>>());
  }
  p.width.push_back(j.at("final_width").get<std::size_t>());
  for (const json& v : j.at("labels")) p.labels.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  p.validate();
  return p;
}

cplx robp_eval(const ROBP& p, std::span<const u64> blocks) {
  if (blocks.size() != p.T()) throw UsageError("ROBP input must have T blocks");
  std::size_t s = 0;
  for (std::size_t t = 0; t < p.T(); ++t) {
    if (p.D < 64 && (blocks[t] >> p.D)) throw UsageError("ROBP block wider than D bits");
    s = p.next[t][(s << p.D) | blocks[t]];
  }
  return p.labels[s];
}

cplx robp_uniform_expectation(const ROBP& p) {
  std::vector<double> dist{1.0};
  std::size_t fan = std::size_t{1} << p.D;
  double w = 1.0 / static_cast<double>(fan);
  for (std::size_t t = 0; t < p.T(); ++t) {
    std::vector<double> nd(p.width[t + 1], 0.0);
    for (std::size_t s = 0; s < p.width[t]; ++s)
      for (std::size_t b = 0; b < fan; ++b) nd[p.next[t][s * fan + b]] += dist[s] * w;
    dist.swap(nd);
  }
  cplx e = 0;
  for (std::size_t s = 0; s < dist.size(); ++s) e += dist[s] * p.labels[s];
  return e;
}

ROBP random_robp(Rng& rng, unsigned S, unsigned D, std::size_t T) {
  ROBP p;
  p.D = D;
  std::size_t w = std::size_t{1} << S, fan = std::size_t{1} << D;
  p.width.assign(T + 1, w);
  p.width[0] = 1;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<std::uint32_t> e(p.width[t] * fan);
    for (auto& s : e) s = static_cast<std::uint32_t>(uniform_below(rng, w));
    p.next.push_back(std::move(e));
  }
  for (std::size_t s = 0; s < p.width[T]; ++s) {
    double r = std::sqrt(uniform01(rng));
    p.labels.push_back(std::polar(r, kTwoPi * uniform01(rng)));
  }
  return p;
}

// ---- INW ----

INWGenerator::INWGenerator(unsigned D, std::size_t T, double delta, InwHash hash, unsigned extra_bits)
    : D_(D), T_(T), delta_(delta), extra_(extra_bits), hash_(hash) {
  if (D == 0) throw UsageError("INW block size must be positive");
  if (T == 0) throw UsageError("INW needs at least one block");
  if (!(delta > 0 && delta < 1)) throw UsageError("INW error must be in (0,1)");
  L_ = ceil_log2(T);
  unsigned need = L_ ? static_cast<unsigned>(std::ceil(std::log2(L_ / delta) - 1e-12)) : 0;
  Dp_ = std::max(D, need) + extra_bits;
  if (Dp_ > 64) Dp_ = static_cast<unsigned>(ceil_div(Dp_, 64) * 64);
  W_ = ceil_div(Dp_, 64);
  if (Dp_ <= 64)
    small_ = Field::binary(Dp_);
  else
    wide_.emplace(Dp_);
}

void INWGenerator::apply(const u64* a, const u64* b, const u64* x, u64* out) const {
  if (hash_ == InwHash::identity) {
    std::copy(x, x + W_, out);
    return;
  }
  if (small_) {
    out[0] = small_->mul(a[0], x[0]) ^ b[0];
    return;
  }
  wide_->mul(a, x, out);
  for (std::size_t i = 0; i < W_; ++i) out[i] ^= b[i];
}

void INWGenerator::expand_words(BitReader& in, std::vector<u64>& out) const {
  std::size_t Tp = T_padded();
  out.assign(Tp * W_, 0);
  std::vector<u64> x = in.take_words(Dp_);
  std::copy(x.begin(), x.end(), out.begin());
  // (a_l, b_l) at [2(l-1) W, 2(l-1) W + 2W)
  std::vector<u64> ab(2 * W_ * L_);
  for (unsigned l = 1; l <= L_; ++l)
    for (int part = 0; part < 2; ++part) {
      u64* dst = &ab[(2 * (l - 1) + part) * W_];
      if (W_ == 1) {
        dst[0] = in.take(Dp_);
      } else {
        std::vector<u64> w = in.take_words(Dp_);
        std::copy(w.begin(), w.end(), dst);
      }
    }
  // list = [x]; for l = L..1 every entry e becomes (e, h_l(e))
  std::size_t len = 1;
  for (unsigned l = L_; l >= 1; --l) {
    for (std::size_t i = len; i-- > 0;) {
      u64* src = &out[i * W_];
      u64* hi = &out[(2 * i + 1) * W_];
      apply(&ab[2 * (l - 1) * W_], &ab[(2 * (l - 1) + 1) * W_], src, hi);
      if (i) std::copy(src, src + W_, &out[2 * i * W_]);
    }
    len *= 2;
  }
}

std::vector<BitString> INWGenerator::expand(BitReader& in) const {
  std::vector<u64> w;
  expand_words(in, w);
  std::vector<BitString> blocks;
  blocks.reserve(T_);
  for (std::size_t j = 0; j < T_; ++j) {
    const u64* v = &w[j * W_];
    BitString s;
    if (W_ == 1) {
      s.append(v[0] >> (Dp_ - D_), D_);
    } else {
      // Dp_ is a multiple of 64 here: take whole words from the top
      std::size_t left = D_;
      for (std::size_t i = W_; i-- > 0 && left;) {
        unsigned take = static_cast<unsigned>(std::min<std::size_t>(64, left));
        s.append(take == 64 ? v[i] : v[i] >> (64 - take), take);
        left -= take;
      }
    }
    blocks.push_back(std::move(s));
  }
  return blocks;
}

void INWGenerator::expand_small(BitReader& in, std::span<u64> blocks) const {
  if (D_ > 64 || blocks.size() != T_) throw UsageError("expand_small needs D <= 64 and T outputs");
  std::vector<u64> w;
  expand_words(in, w);
  if (W_ == 1) {
    for (std::size_t j = 0; j < T_; ++j) blocks[j] = w[j] >> (Dp_ - D_);
  } else {
    for (std::size_t j = 0; j < T_; ++j) {
      u64 top = w[j * W_ + W_ - 1];
      blocks[j] = D_ == 64 ? top : top >> (64 - D_);
    }
  }
}

json INWGenerator::to_json() const {
  return json{{"kind", "inw"},
              {"D", D_},
              {"T", T_},
              {"levels", L_},
              {"block_bits", Dp_},
              {"delta", delta_},
              {"extra_bits", extra_},
              {"hash", hash_ == InwHash::affine ? "affine" : "identity"},
              {"seed_bits", seed_bits()}};
}

std::vector<BitString> inw_expand(const INWGenerator& g, const BitString& seed) {
  if (seed.size() != g.seed_bits()) throw UsageError("INW seed must have " + std::to_string(g.seed_bits()) + " bits");
  BitReader in(seed);
  return g.expand(in);
}

unsigned default_precision(std::size_t n, double delta) {
  if (!(delta > 0 && delta < 1)) throw UsageError("delta must be in (0,1)");
  return 2 * static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 1)) / delta) - 1e-12));
}

// ---- shapes as branching programs ----

namespace {

struct Rounded {
  bool zero = false;
  u64 phase = 0;  // turns * 2^P mod 2^P
  u64 logmag = 0;  // -log2|v| * 2^P
};

Rounded round_entry(cplx v, unsigned P) {
  double scale = std::ldexp(1.0, static_cast<int>(P));
  u64 cap = u64{P} << P;
  double mag = std::abs(v);
  Rounded r;
  if (mag == 0) {
    r.zero = true;
    return r;
  }
  double lm = std::nearbyint(std::max(0.0, -std::log2(mag)) * scale);
  if (lm > static_cast<double>(cap)) {
    r.zero = true;
    return r;
  }
  r.logmag = static_cast<u64>(lm);
  double turns = std::arg(v) / kTwoPi;
  long long ph = static_cast<long long>(std::nearbyint(turns * scale));
  r.phase = static_cast<u64>(ph) & ((u64{1} << P) - 1);
  return r;
}

cplx rounded_value(u64 phase, u64 logmag, unsigned P) {
  double scale = std::ldexp(1.0, -static_cast<int>(P));
  return std::polar(std::exp2(-static_cast<double>(logmag) * scale), kTwoPi * static_cast<double>(phase) * scale);
}

}  // namespace

ROBP shape_to_robp(const FourierShape& f, unsigned precision_bits) {
  if (!is_pow2(f.m())) throw UsageError("shape_to_robp needs a power-of-two alphabet");
  if (precision_bits == 0 || precision_bits > 26) throw UsageError("precision must be in [1, 26] bits");
  const unsigned P = precision_bits;
  const u64 cap = u64{P} << P;
  ROBP p;
  p.D = floor_log2(f.m());
  p.width = {1};
  // state key: phase | logmag << P; the zero state uses an out-of-range key
  const u64 kZero = ~u64{0};
  std::vector<u64> keys{0};
  std::vector<Rounded> steps(f.m());
  for (std::size_t j = 0; j < f.n(); ++j) {
    for (u64 x = 0; x < f.m(); ++x) steps[x] = round_entry(f.at(j, x), P);
    std::unordered_map<u64, std::uint32_t> index;
    std::vector<u64> nkeys;
    auto state_of = [&](u64 key) {
      auto [it, fresh] = index.emplace(key, static_cast<std::uint32_t>(nkeys.size()));
      if (fresh) {
        nkeys.push_back(key);
        if (nkeys.size() > kMaxShapeWidth) throw RefusalError("shape program wider than 2^22 states");
      }
      return it->second;
    };
    std::vector<std::uint32_t> edges(keys.size() * f.m());
    for (std::size_t s = 0; s < keys.size(); ++s) {
      u64 key = keys[s];
      for (u64 x = 0; x < f.m(); ++x) {
        u64 nk = kZero;
        if (key != kZero && !steps[x].zero) {
          u64 ph = ((key & ((u64{1} << P) - 1)) + steps[x].phase) & ((u64{1} << P) - 1);
          u64 lm = (key >> P) + steps[x].logmag;
          if (lm <= cap) nk = ph | (lm << P);
        }
        edges[s * f.m() + x] = state_of(nk);
      }
    }
    p.next.push_back(std::move(edges));
    p.width.push_back(nkeys.size());
    keys.swap(nkeys);
  }
  for (u64 key : keys) p.labels.push_back(key == kZero ? cplx(0) : rounded_value(key & ((u64{1} << P) - 1), key >> P, P));
  return p;
}

FourierShape discretize_shape(const FourierShape& f, unsigned precision_bits) {
  if (precision_bits == 0 || precision_bits > 26) throw UsageError("precision must be in [1, 26] bits");
  std::vector<cplx> t(f.table().size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    Rounded r = round_entry(f.table()[i], precision_bits);
    t[i] = r.zero ? cplx(0) : rounded_value(r.phase, r.logmag, precision_bits);
  }
  return FourierShape(f.m(), f.n(), std::move(t));
}

}  // namespace fprg
