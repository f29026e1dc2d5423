// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include "fprg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fprg/robp.hpp"

namespace fprg {

// ---- settings ----

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

u64 parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || v.find('-') != std::string::npos) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError(key + " needs a non-negative integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError(key + " needs a number, got '" + v + "'");
  }
}

std::pair<std::string, std::string> split_kv(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got '" + s + "'");
  return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

std::string json_scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

void Settings::set(const std::string& key, const std::string& value) {
  if (key == "enum_cap") {
    u64 c = parse_u64(key, value);
    if (c > 40) throw UsageError("enum_cap is at most 40");
    enum_cap = static_cast<unsigned>(c);
  } else if (key == "samples") {
    samples = parse_u64(key, value);
  } else if (key == "sample_seed") {
    sample_seed = parse_u64(key, value);
  } else if (key == "window_cap") {
    window_cap = parse_u64(key, value);
    if (window_cap == 0) throw UsageError("window_cap must be positive");
  } else if (key == "slack_sigmas") {
    slack_sigmas = parse_double(key, value);
    if (slack_sigmas < 0) throw UsageError("slack_sigmas must be non-negative");
  } else if (key == "threads") {
    threads = static_cast<unsigned>(parse_u64(key, value));
  } else {
    knobs.set(key, value);
  }
}

void Settings::apply(const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) set(k, v);
}

json Settings::to_json() const {
  return {{"knobs", knobs.to_json()}, {"enum_cap", enum_cap}, {"samples", samples}, {"sample_seed", sample_seed},
          {"window_cap", window_cap}, {"slack_sigmas", slack_sigmas}};
}

EvalMode Settings::mode() const {
  EvalMode m = EvalMode::enumerate(enum_cap);
  m.samples = samples;
  m.rng_seed = sample_seed;
  m.threads = threads;
  return m;
}

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) throw UsageError("config line " + std::to_string(no) + ": expected key = value");
    kv.push_back(split_kv(line));
  }
  return kv;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

BitString seed_from_hex(const std::string& hex, std::size_t r) {
  std::string h = hex.starts_with("0x") ? hex.substr(2) : hex;
  if (h.empty()) throw UsageError("empty seed");
  BitString full = BitString::from_hex(h);
  if (full.size() >= r) {
    for (std::size_t i = 0; i < full.size() - r; ++i)
      if (full.get(i)) throw UsageError("seed does not fit " + std::to_string(r) + " bits");
    return full.slice(full.size() - r, r);
  }
  BitString s(r - full.size());
  s.append(full);
  return s;
}

namespace {

// Big-endian increment modulo 2^r.
void increment(BitString& s) {
  for (std::size_t i = s.size(); i-- > 0;) {
    bool b = s.get(i);
    s.set(i, !b);
    if (!b) return;
  }
}

// The INW blocks themselves as a generator over [2^D]^T.
class InwBlocks final : public Generator {
 public:
  InwBlocks(unsigned D, std::size_t T, double delta) : Generator(Alphabet::pow2(D), T), inw_(D, T, delta) {
    if (D > 63) throw UsageError("robp campaigns need D <= 63");
  }
  std::size_t local_bits() const override { return inw_.seed_bits(); }
  std::string kind() const override { return "inw-blocks"; }
  void fill(BitReader& in, std::span<Symbol> out) const override { inw_.expand_small(in, out); }
  json params() const override { return {{"inw", inw_.to_json()}}; }

 private:
  INWGenerator inw_;
};

Rng instance_rng(u64 seed, std::size_t i) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(i),
                   static_cast<std::uint32_t>(static_cast<u64>(i) >> 32)};
  return Rng(ss);
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("campaign field ") + key + ": " + e.what());
  }
}

const std::vector<std::string> kFamilies{"shapes", "halfspaces", "gen-halfspaces", "modular", "comb-shapes", "chernoff", "metric-lemmas", "robp"};

struct Campaign {
  std::string name, family, generator;
  Alphabet m;
  std::size_t n = 0;
  double eps = 0;
  std::size_t instances = 0;
  u64 rng_seed = 1;
  json params, tolerance;
  Settings settings;
};

Campaign parse_campaign(const json& c, const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (!c.is_object()) throw UsageError("a campaign must be a JSON object");
  Campaign k;
  k.name = field_or<std::string>(c, "name", "campaign");
  k.family = field_or<std::string>(c, "family", "");
  if (std::find(kFamilies.begin(), kFamilies.end(), k.family) == kFamilies.end())
    throw UsageError("unknown campaign family '" + k.family + "'");
  k.generator = field_or<std::string>(c, "generator", "composed");
  if (k.generator != "composed" && k.generator != "uniform-stub") throw UsageError("unknown generator '" + k.generator + "'");
  k.params = field_or<json>(c, "params", json::object());
  k.tolerance = field_or<json>(c, "tolerance", json::object());
  if (k.family == "robp") {
    unsigned D = field_or<unsigned>(k.params, "D", 2);
    k.m = Alphabet::pow2(D);
    k.n = field_or<std::size_t>(k.params, "T", 4);
  } else if (k.family != "metric-lemmas") {
    k.m = c.contains("m") ? Alphabet::parse(json_scalar(c.at("m"))) : Alphabet::of(2);
    k.n = field_or<std::size_t>(c, "n", 0);
    if (k.n == 0) throw UsageError("campaign needs n >= 1");
  }
  k.eps = field_or<double>(c, "eps", 0.1);
  if (!(k.eps > 0)) throw UsageError("campaign eps must be positive");
  k.instances = field_or<std::size_t>(c, "instances", 0);
  k.rng_seed = field_or<u64>(c, "rng_seed", 1);
  const json settings = field_or<json>(c, "settings", json::object());
  for (auto& [key, v] : settings.items()) k.settings.set(key, json_scalar(v));
  k.settings.apply(overrides);
  return k;
}

InstanceResult refused(std::size_t i, const Campaign& k, const std::string& why) {
  InstanceResult r;
  r.index = i;
  r.family = k.family;
  r.m = k.family == "metric-lemmas" ? "" : k.m.to_string();
  r.n = k.n;
  r.eps = k.eps;
  r.target = k.eps;
  r.mode = "refused";
  r.refusal = why;
  return r;
}

void fill_from(InstanceResult& r, const AppError& e) {
  r.err = e.error;
  r.std_err = e.std_err;
  r.seeds = e.seeds;
  r.mode = e.exact ? "enumerate" : "sample";
  r.detail = {{"generator", e.generator}, {"uniform", e.uniform}};
}

}  // namespace

json instance_to_json(const InstanceResult& r, const std::string& campaign) {
  json j = {{"type", "instance"}, {"campaign", campaign}, {"index", r.index}, {"family", r.family}, {"m", r.m}, {"n", r.n},
            {"eps", r.eps}, {"target", r.target}, {"err", r.err}, {"std_err", r.std_err}, {"seeds", r.seeds},
            {"mode", r.mode}, {"pass", r.pass}};
  if (!r.refusal.empty()) j["refusal"] = r.refusal;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

CampaignResult run_campaign(const json& doc, const std::vector<std::pair<std::string, std::string>>& overrides, unsigned threads,
                            const std::function<void(const std::string&)>& sink) {
  Campaign k = parse_campaign(doc, overrides);
  if (threads) k.settings.threads = threads;
  const Settings& s = k.settings;
  CampaignResult res;
  res.header = {{"type", "header"}, {"format", "fprg-report/1"}, {"campaign", k.name}, {"family", k.family},
                {"generator", k.family == "robp" ? "inw-blocks" : k.family == "metric-lemmas" ? "none" : k.generator},
                {"m", k.family == "metric-lemmas" ? "" : k.m.to_string()}, {"n", k.n}, {"eps", k.eps},
                {"instances", k.instances}, {"rng_seed", k.rng_seed}, {"params", k.params}, {"tolerance", k.tolerance},
                {"settings", s.to_json()}};

  // generator and its output multiset, shared by all instances
  GenPtr gen;
  std::optional<OutputSample> sample;
  std::optional<ChernoffSampler> sampler;
  std::string gen_refusal;
  std::vector<double> ts;
  try {
    if (k.family == "chernoff") {
      ts = field_or<std::vector<double>>(k.params, "t", {8, 16, 24});
      k.instances = ts.size();
      res.header["instances"] = k.instances;
      const u64 m = k.m.size();
      std::vector<std::vector<double>> pmfs(k.n, std::vector<double>(m, 1.0 / static_cast<double>(m)));
      sampler.emplace(ChernoffSampler::build(pmfs, k.eps, s.knobs));
      res.header["seed_bits"] = sampler->seed_bits();
      res.header["r_x"] = sampler->bits();
      res.header["mode"] = "sample";
    } else if (k.family == "robp") {
      gen = std::make_shared<InwBlocks>(field_or<unsigned>(k.params, "D", 2), k.n, field_or<double>(k.params, "delta", k.eps));
    } else if (k.family != "metric-lemmas") {
      if (k.generator == "uniform-stub")
        gen = std::make_shared<UniformStub>(k.m, k.n);
      else
        gen = build_generator(k.m, k.n, k.eps, s.knobs);
    }
    if (gen) {
      res.header["seed_bits"] = gen->seed_bits();
      EvalMode mode = s.mode().resolve(gen->seed_bits());
      res.header["mode"] = mode.kind == EvalMode::Kind::enumerate ? "enumerate" : "sample";
      if (k.instances > 0) sample.emplace(OutputSample::collect(*gen, mode));
    }
  } catch (const RefusalError& e) {
    gen_refusal = e.what();
    res.header["refusal"] = gen_refusal;
  }
  sink(res.header.dump());

  res.rows.resize(k.instances);
  const double sig = s.slack_sigmas;
  auto eval = [&](std::size_t i) {
    if (!gen_refusal.empty()) {
      res.rows[i] = refused(i, k, gen_refusal);
      return;
    }
    Rng rng = instance_rng(k.rng_seed, i);
    InstanceResult r;
    r.index = i;
    r.family = k.family;
    r.m = k.family == "metric-lemmas" ? "" : k.m.to_string();
    r.n = k.n;
    r.eps = k.eps;
    r.target = k.eps;
    try {
      if (k.family == "shapes") {
        ShapeKind kind = parse_shape_kind(field_or<std::string>(k.params, "kind", "disk"));
        FourierShape f = random_shape(rng, k.m.size(), k.n, kind);
        Estimate e = sample->expect(f);
        cplx u = uniform_expectation(f);
        r.err = std::abs(e.value - u);
        r.std_err = e.std_err;
        r.seeds = e.seeds_used;
        r.mode = e.exact ? "enumerate" : "sample";
        r.detail = {{"tvar", tvar(f)}};
      } else if (k.family == "halfspaces") {
        if (!(k.m == Alphabet::of(2))) throw UsageError("halfspace campaigns run over {0,1}^n");
        long long W = field_or<long long>(k.params, "max_weight", static_cast<long long>(k.n));
        fill_from(r, halfspace_error(*sample, random_halfspace(rng, k.n, W), s.window_cap));
      } else if (k.family == "gen-halfspaces") {
        long long W = field_or<long long>(k.params, "max_weight", static_cast<long long>(k.n));
        fill_from(r, gen_halfspace_error(*sample, random_gen_halfspace(rng, k.m.size(), k.n, W), s.window_cap));
      } else if (k.family == "modular") {
        if (!(k.m == Alphabet::of(2))) throw UsageError("modular campaigns run over {0,1}^n");
        std::vector<u64> moduli = field_or<std::vector<u64>>(k.params, "moduli", {3});
        if (moduli.empty()) throw UsageError("modular campaign needs moduli");
        u64 M = moduli[i % moduli.size()];
        fill_from(r, modular_error(*sample, random_modular(rng, k.n, M)));
        r.detail["M"] = M;
      } else if (k.family == "comb-shapes") {
        fill_from(r, comb_shape_error(*sample, random_comb_shape(rng, k.m.size(), k.n)));
      } else if (k.family == "chernoff") {
        const u64 m = k.m.size();
        std::vector<std::vector<double>> g(k.n, std::vector<double>(m));
        for (auto& row : g)
          for (u64 a = 0; a < m; ++a) row[a] = a % 2 ? 1.0 : -1.0;
        u64 trials = field_or<u64>(k.params, "trials", 1'000'000);
        TailReport t = chernoff_tail_check(*sampler, g, ts[i], trials, s.sample_seed + i);
        r.err = t.tail;
        r.target = t.bound;
        r.std_err = t.std_err;
        r.seeds = t.trials;
        r.mode = "sample";
        r.detail = {{"t", ts[i]}};
      } else if (k.family == "metric-lemmas") {
        long long N_max = field_or<long long>(k.params, "N_max", 256);
        double eta = field_or<double>(k.params, "eta", k.eps / 100);
        double C_K = field_or<double>(k.params, "C_K", 10);
        long long N = 1 + static_cast<long long>(uniform_below(rng, static_cast<u64>(N_max)));
        auto [p, q] = random_pmf_pair(rng, N);
        LemmaReport L = fourier_lemma_check(p, q, eta, C_K);
        r.err = std::max(L.tv_ratio, L.k_ratio);
        r.target = 1;
        r.mode = "exact";
        r.detail = L.to_json();
      } else if (k.family == "robp") {
        ROBP p = random_robp(rng, field_or<unsigned>(k.params, "S", 4), field_or<unsigned>(k.params, "D", 2), k.n);
        Estimate e = sample->expect([&](std::span<const Symbol> x) { return robp_eval(p, x); });
        r.err = std::abs(e.value - robp_uniform_expectation(p));
        r.std_err = e.std_err;
        r.seeds = e.seeds_used;
        r.mode = e.exact ? "enumerate" : "sample";
      }
      bool exact = r.mode == "enumerate" || r.mode == "exact";
      r.pass = r.err <= r.target + (exact ? 0.0 : sig * r.std_err);
    } catch (const RefusalError& e) {
      r = refused(i, k, e.what());
    }
    res.rows[i] = std::move(r);
  };
  parallel_for(k.instances, s.threads, eval);

  std::size_t refusals = 0, passing = 0;
  double max_err = 0, sum = 0;
  const double within = field_or<double>(k.tolerance, "within_target", 1.0);
  const bool has_hard = k.tolerance.contains("max_err");
  const double hard = field_or<double>(k.tolerance, "max_err", 0);
  bool all_under_hard = true;
  for (const InstanceResult& r : res.rows) {
    sink(instance_to_json(r, k.name).dump());
    if (!r.refusal.empty()) {
      ++refusals;
      continue;
    }
    max_err = std::max(max_err, r.err);
    sum += r.err;
    if (r.pass) ++passing;
    bool exact = r.mode == "enumerate" || r.mode == "exact";
    double cap = has_hard ? hard : r.target;
    if (r.err > cap + (exact ? 0.0 : sig * r.std_err)) all_under_hard = false;
  }
  const std::size_t evaluated = res.rows.size() - refusals;
  const double frac = evaluated ? static_cast<double>(passing) / static_cast<double>(evaluated) : 1.0;
  res.pass = refusals == 0 && frac >= within && all_under_hard;
  res.summary = {{"type", "summary"}, {"campaign", k.name}, {"count", res.rows.size()}, {"evaluated", evaluated},
                 {"refused", refusals}, {"max_err", max_err}, {"mean_err", evaluated ? sum / static_cast<double>(evaluated) : 0.0},
                 {"within_target", frac}, {"pass", res.pass}};
  sink(res.summary.dump());
  return res;
}

// ---- commands ----

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  unsigned threads = 0;

  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> kv;
    if (!config.empty()) kv = read_config_file(config);
    for (const auto& s : sets) kv.push_back(split_kv(s));
    return kv;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value settings file");
  cmd->add_option("--set", c.sets, "key=value setting, overrides the config file")->take_all();
  cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

struct GenArgs {
  std::string m, seed, plan_out;
  std::size_t n = 0;
  double eps = 0;
  u64 samples = 0;
};

int cmd_gen(const GenArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  Settings s;
  s.apply(c.overrides());
  Plan plan = build_plan(Alphabet::parse(a.m), a.n, a.eps, s.knobs);
  const std::size_t r = plan.seed_bits();
  err << "seed_bits " << r << "\n";
  if (!a.plan_out.empty()) {
    std::ofstream f(a.plan_out);
    if (!f) throw UsageError("cannot write " + a.plan_out);
    f << plan.to_json().dump(2) << "\n";
  }
  if (a.samples == 0) {
    if (a.plan_out.empty()) out << plan.to_json().dump(2) << "\n";
    return 0;
  }
  BitString seed;
  Rng rng(s.sample_seed);
  if (!a.seed.empty()) seed = seed_from_hex(a.seed, r);
  std::vector<Symbol> y(a.n);
  std::string line;
  for (u64 k = 0; k < a.samples; ++k) {
    if (a.seed.empty())
      seed = random_bits(rng, r);
    else if (k > 0)
      increment(seed);
    plan.root->generate_into(seed, y);
    line.clear();
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i) line += ' ';
      line += std::to_string(y[i]);
    }
    out << line << "\n";
  }
  return 0;
}

struct VerifyArgs {
  std::vector<std::string> files;
  std::string out_path, family, m = "2", generator = "composed";
  std::size_t n = 0, instances = 0;
  double eps = 0.1;
  u64 rng_seed = 1;
};

int cmd_verify(const VerifyArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  std::vector<json> campaigns;
  for (const auto& path : a.files) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read campaign file " + path);
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
    if (doc.contains("campaigns")) {
      for (const json& x : doc.at("campaigns")) campaigns.push_back(x);
    } else {
      campaigns.push_back(doc);
    }
  }
  if (!a.family.empty()) {
    campaigns.push_back({{"name", a.family}, {"family", a.family}, {"generator", a.generator}, {"m", a.m}, {"n", a.n},
                         {"eps", a.eps}, {"instances", a.instances}, {"rng_seed", a.rng_seed}});
  }
  if (a.files.empty() && a.family.empty()) throw UsageError("verify needs a campaign file or --family");
  auto kv = c.overrides();
  for (const json& x : campaigns) parse_campaign(x, kv);  // reject bad documents before any work

  std::ofstream file;
  if (!a.out_path.empty()) {
    file.open(a.out_path);
    if (!file) throw UsageError("cannot write " + a.out_path);
  }
  std::ostream& sink_stream = a.out_path.empty() ? out : file;
  std::mutex mu;
  auto sink = [&](const std::string& line) {
    std::lock_guard lk(mu);
    sink_stream << line << "\n";
  };
  bool pass = true;
  for (const json& x : campaigns) {
    CampaignResult r = run_campaign(x, kv, c.threads, sink);
    err << r.summary.at("campaign").get<std::string>() << ": " << (r.pass ? "pass" : "FAIL") << " (max_err "
        << r.summary.at("max_err").get<double>() << ", " << r.rows.size() << " instances)\n";
    pass = pass && r.pass;
  }
  return pass ? 0 : 1;
}

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return s;
}

const std::vector<std::string> kColumns{"campaign", "index", "family", "m", "n", "eps", "target", "err", "std_err", "seeds", "mode", "pass"};

int cmd_report(const std::vector<std::string>& files, bool summary, const std::string& csv_path, std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << "source";
  for (const auto& col : kColumns) csv << "," << col;
  csv << "\n";
  json total = {{"type", "total"}, {"rows", 0}, {"max_err", 0.0}, {"pass", true}};
  std::vector<json> per_file;
  for (const auto& path : files) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read report file " + path);
    std::string line;
    int no = 0;
    std::size_t rows = 0;
    double max_err = 0, sum = 0;
    bool pass = true;
    while (std::getline(f, line)) {
      ++no;
      if (trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
        if (!j.is_object() || !j.contains("type")) throw std::runtime_error("no type");
      } catch (const std::exception&) {
        err << "warning: " << path << ":" << no << ": skipped malformed line\n";
        continue;
      }
      if (j.at("type") != "instance") continue;
      bool ok = true;
      for (const auto& col : kColumns) ok = ok && j.contains(col);
      if (!ok) {
        err << "warning: " << path << ":" << no << ": skipped instance line with missing fields\n";
        continue;
      }
      csv << csv_field(path);
      for (const auto& col : kColumns) csv << "," << csv_field(j.at(col));
      csv << "\n";
      ++rows;
      double e = j.at("err").is_number() ? j.at("err").get<double>() : 0.0;
      max_err = std::max(max_err, e);
      sum += e;
      pass = pass && j.at("pass").is_boolean() && j.at("pass").get<bool>();
    }
    per_file.push_back({{"type", "file"}, {"source", path}, {"rows", rows}, {"max_err", max_err},
                        {"mean_err", rows ? sum / static_cast<double>(rows) : 0.0}, {"pass", pass}});
    total["rows"] = total["rows"].get<std::size_t>() + rows;
    total["max_err"] = std::max(total["max_err"].get<double>(), max_err);
    total["pass"] = total["pass"].get<bool>() && pass;
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw UsageError("cannot write " + csv_path);
    f << csv.str();
  }
  if (summary) {
    for (const json& j : per_file) out << j.dump() << "\n";
    out << total.dump() << "\n";
  } else if (csv_path.empty()) {
    out << csv.str();
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudorandom generators for Fourier shapes: plans, samples, verification campaigns"};
  app.name("fprg");
  app.require_subcommand(1);

  Common gc, vc;
  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "build a plan; print it or emit samples");
  gen->add_option("--m", ga.m, "alphabet size (integer or 2^k)")->required();
  gen->add_option("--n", ga.n, "output length")->required()->check(CLI::PositiveNumber);
  gen->add_option("--eps", ga.eps, "target error")->required();
  gen->add_option("--seed", ga.seed, "first seed, big-endian hex; later samples add 1");
  gen->add_option("--samples", ga.samples, "number of samples to emit");
  gen->add_option("--plan-out", ga.plan_out, "write the plan JSON here");
  add_common(gen, gc);

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run verification campaigns, JSON lines out");
  ver->add_option("campaigns", va.files, "campaign files");
  ver->add_option("--out", va.out_path, "write the report here instead of stdout");
  ver->add_option("--family", va.family, "ad hoc campaign family");
  ver->add_option("--generator", va.generator, "composed | uniform-stub");
  ver->add_option("--m", va.m, "alphabet size");
  ver->add_option("--n", va.n, "output length");
  ver->add_option("--eps", va.eps, "target error");
  ver->add_option("--instances", va.instances, "instance count");
  ver->add_option("--rng-seed", va.rng_seed, "instance generation seed");
  add_common(ver, vc);

  std::vector<std::string> rfiles;
  bool summary = false;
  std::string csv_path;
  auto* rep = app.add_subcommand("report", "aggregate reports into CSV or a summary");
  rep->add_option("reports", rfiles, "JSON-lines report files")->required();
  rep->add_flag("--summary", summary, "per-file and total maxima instead of CSV");
  rep->add_option("--csv", csv_path, "write the CSV here");

  std::vector<std::string> argv_s{"fprg"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_s) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (gen->parsed()) return cmd_gen(ga, gc, out, err);
    if (ver->parsed()) return cmd_verify(va, vc, out, err);
    return cmd_report(rfiles, summary, csv_path, out, err);
  } catch (const RefusalError& e) {
    err << "refused: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace fprg
