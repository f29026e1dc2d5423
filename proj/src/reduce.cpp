// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/reduce.hpp"

#include <cmath>
#include <limits>

namespace fprg {

namespace {

u64 isqrt(u64 m) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(m)));
  while (r > 0 && u128{r} * r > m) --r;
  while (u128{r + 1} * (r + 1) <= m) ++r;
  return r;
}

// Column seeds are words of cb bits; they are produced as independent k-wise strings over
// chunks of at most 62 bits, which together are k-wise over [2^cb].
constexpr unsigned kChunk = 62;

std::vector<KWiseFamily> split_family(std::size_t n, unsigned bits, unsigned k) {
  std::vector<KWiseFamily> parts;
  for (unsigned left = bits; left > 0;) {
    unsigned c = std::min(left, kChunk);
    parts.emplace_back(n, Alphabet::pow2(c), k);
    left -= c;
  }
  return parts;
}

}  // namespace

Alphabet alphabet_sqrt(const Alphabet& m) {
  if (m.is_pow2()) return Alphabet::pow2(m.bits() / 2);
  return Alphabet::of(isqrt(m.size()));
}

bool exceeds_n4(const Alphabet& m, std::size_t n) {
  if (n <= 1) return m.bits() > 0;
  if (m.materializable() && n < (std::size_t{1} << 16)) {
    u64 n4 = u64{n} * n * n * n;
    return m.size() > n4;
  }
  if (is_pow2(n)) return m.log2() > 4.0 * floor_log2(n);
  return m.log2() > 4.0 * std::log2(static_cast<double>(n));
}

// ---- alphabet step ----

AlphabetStep::AlphabetStep(Alphabet m, std::size_t n, double delta, GenPtr inner, AlphabetStepParams params)
    : Generator(m, n), delta_(delta), p_(params), D_(alphabet_sqrt(m)), inner_(std::move(inner)) {
  if (!(delta > 0 && delta < 1)) throw UsageError("alphabet step error must be in (0,1)");
  if (!p_.force && !exceeds_n4(m, n)) throw RefusalError("alphabet step needs m > n^4 (m = " + m.to_string() + ", n = " + std::to_string(n) + ")");
  if (!inner_ || inner_->n() != n || !(inner_->alphabet() == D_))
    throw UsageError("alphabet step needs an inner generator over [" + D_.to_string() + "]^" + std::to_string(n));
  double lnm = m.log2() * std::log(2.0);
  k_ = static_cast<unsigned>(std::max(2.0, std::ceil(p_.C * std::log(1 / delta) / lnm - 1e-12)));
  std::size_t rows = D_.materializable() ? static_cast<std::size_t>(D_.size()) : std::numeric_limits<std::size_t>::max();
  col_ = KWiseFamily(rows, m, 2, p_.delta_map);
  cross_ = split_family(n, static_cast<unsigned>(col_.seed_bits()), k_);
}

std::size_t AlphabetStep::local_bits() const {
  std::size_t r = 0;
  for (const KWiseFamily& p : cross_) r += p.seed_bits();
  return r;
}

namespace {

// Column seeds for all n columns, cb bits each, as BitStrings.
std::vector<BitString> column_seeds(const std::vector<KWiseFamily>& parts, std::size_t n, BitReader& in) {
  std::vector<BitString> seeds(n);
  for (const KWiseFamily& p : parts) {
    std::vector<u64> c(std::max(1u, p.k()));
    p.decode(in, c.data());
    unsigned w = p.alphabet().bits();
    for (std::size_t j = 0; j < n; ++j) seeds[j].append(p.eval(c.data(), j), w);
  }
  return seeds;
}

}  // namespace

std::vector<Symbol> AlphabetStep::matrix(BitReader& in) const {
  require_materializable();
  u64 D = D_.size();
  std::vector<BitString> seeds = column_seeds(cross_, n(), in);
  std::vector<Symbol> X(D * n());
  std::vector<u64> c(2);
  for (std::size_t j = 0; j < n(); ++j) {
    BitReader r(seeds[j]);
    col_.decode(r, c.data());
    for (u64 l = 0; l < D; ++l) X[l * n() + j] = col_.eval(c.data(), l);
  }
  return X;
}

void AlphabetStep::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  std::vector<BitString> seeds = column_seeds(cross_, n(), in);
  inner_->fill(in, out);
  std::vector<u64> c(2);
  for (std::size_t j = 0; j < n(); ++j) {
    BitReader r(seeds[j]);
    col_.decode(r, c.data());
    out[j] = col_.eval(c.data(), out[j]);
  }
}

json AlphabetStep::params() const {
  json cross = json::array();
  for (const KWiseFamily& p : cross_) cross.push_back(p.to_json());
  return {{"D", D_.to_string()}, {"k", k()}, {"C", p_.C}, {"delta", delta_}, {"delta_map", p_.delta_map}, {"force", p_.force},
          {"column", col_.to_json()}, {"cross", cross}};
}

std::vector<Symbol> alphabet_combine(std::span<const Symbol> X, std::size_t D, std::span<const Symbol> Y) {
  std::size_t n = Y.size();
  if (X.size() != D * n) throw UsageError("matrix must be D x n");
  std::vector<Symbol> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (Y[j] >= D) throw UsageError("row index out of range");
    z[j] = X[Y[j] * n + j];
  }
  return z;
}

cplx bias_function(const FourierShape& f, std::span<const Symbol> X, std::size_t D) {
  std::size_t n = f.n();
  if (D == 0 || X.size() != D * n) throw UsageError("bias function needs a D x n matrix");
  cplx prod = 1;
  for (std::size_t j = 0; j < n; ++j) {
    cplx s = 0;
    for (std::size_t l = 0; l < D; ++l) s += f.at(j, X[l * n + j]);
    prod *= s / static_cast<double>(D);
  }
  return prod;
}

std::vector<Alphabet> alphabet_chain(Alphabet m, std::size_t n) {
  std::vector<Alphabet> chain{m};
  while (exceeds_n4(chain.back(), n) && chain.back().bits() > 1) chain.push_back(alphabet_sqrt(chain.back()));
  return chain;
}

GenPtr alphabet_reduce(Alphabet m, std::size_t n, double delta, const GenFactory& base, AlphabetStepParams params) {
  std::vector<Alphabet> chain = alphabet_chain(m, n);
  std::size_t steps = chain.size() - 1;
  GenPtr g = base(chain.back(), n);
  if (steps == 0) return g;
  double d = delta / static_cast<double>(steps);
  for (std::size_t i = steps; i-- > 0;) {
    auto s = std::make_shared<AlphabetStep>(chain[i], n, d, g, params);
    s->set_eps(d);
    g = s;
  }
  return g;
}

// ---- dimension step ----

std::size_t DimStep::bucket_count(std::size_t n) { return n <= 1 ? 1 : static_cast<std::size_t>(isqrt(n - 1) + 1); }

unsigned DimStep::independence(std::size_t n, double delta, double C) {
  if (n <= 1) return 2;
  double k = std::ceil(C * std::log(static_cast<double>(n) / delta) / std::log(static_cast<double>(n)) - 1e-12);
  return static_cast<unsigned>(std::max(2.0, k));
}

DimStep::DimStep(Alphabet m, std::size_t n, double delta, const GenFactory& inner, DimStepParams params)
    : Generator(m, n), delta_(delta), p_(params) {
  if (n == 0) throw UsageError("dimension step needs n >= 1");
  if (!(delta > 0 && delta < 1)) throw UsageError("dimension step error must be in (0,1)");
  t_ = bucket_count(n);
  k_ = independence(n, delta, p_.C);
  hash_ = CombinedHashFamily(n, t_, k_, 0.0, p_.delta_map);
  g0_ = KWiseFamily(n, m, k_, p_.delta_map);
  inner_ = inner(inner_alphabet(), t_);
  if (!inner_ || inner_->n() != t_ || !(inner_->alphabet() == inner_alphabet()))
    throw UsageError("dimension step needs an inner generator over [2^" + std::to_string(r0()) + "]^" + std::to_string(t_));
}

void DimStep::fill(BitReader& in, std::span<Symbol> out) const {
  require_materializable();
  std::vector<u64> h(n());
  hash_.fill(in, h);
  std::vector<Symbol> blocks(t_);
  inner_->fill(in, blocks);
  std::size_t kk = std::max(1u, g0_.k());
  std::vector<u64> coeffs(t_ * kk);
  for (std::size_t j = 0; j < t_; ++j) {
    BitString s = BitString::from_uint(blocks[j], r0());
    BitReader r(s);
    g0_.decode(r, &coeffs[j * kk]);
  }
  for (std::size_t i = 0; i < n(); ++i) out[i] = g0_.eval(&coeffs[h[i] * kk], i);
}

json DimStep::params() const {
  return {{"t", t_}, {"k", k_}, {"C", p_.C}, {"delta", delta_}, {"delta_map", p_.delta_map}, {"r0", r0()},
          {"inner_m", inner_alphabet().to_string()}, {"hash", hash_.to_json()}, {"bucket_family", g0_.to_json()}};
}

bool is_good_hash(std::span<const u64> h, const FourierShape& f, double alpha, double beta, unsigned k) {
  if (h.size() != f.n()) throw UsageError("hash table length must equal n");
  ShapeStats st = stats(f);
  u64 t = 0;
  for (u64 b : h) t = std::max(t, b + 1);
  std::vector<unsigned> big(t, 0);
  std::vector<double> small(t, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (st.var[i] >= alpha)
      ++big[h[i]];
    else
      small[h[i]] += st.var[i];
  }
  for (u64 j = 0; j < t; ++j)
    if (2 * big[j] > k || small[j] > beta) return false;
  return true;
}

}  // namespace fprg
