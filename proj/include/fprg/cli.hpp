// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fprg/apps.hpp"
#include "fprg/compose.hpp"

namespace fprg {

// Every tunable of a run. Precedence, lowest first: defaults, campaign "settings",
// --config file, --set flags.
struct Settings {
  ComposeKnobs knobs;
  unsigned enum_cap = 26;
  u64 samples = 0;  // sample budget when r > enum_cap; 0 refuses instead
  u64 sample_seed = 1;
  std::size_t window_cap = kDefaultWindowCap;
  double slack_sigmas = 3;
  unsigned threads = 0;  // not echoed: results do not depend on it

  // Knob keys go to ComposeKnobs::set. UsageError on unknown keys.
  void set(const std::string& key, const std::string& value);
  void apply(const std::vector<std::pair<std::string, std::string>>& kv);
  json to_json() const;
  EvalMode mode() const;
};

// "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// r-bit seed from a big-endian hex integer (leading zeros optional).
BitString seed_from_hex(const std::string& hex, std::size_t r);

struct InstanceResult {
  std::size_t index = 0;
  std::string family;
  std::string m;
  std::size_t n = 0;
  double eps = 0;
  double target = 0;  // eps for fooling families; the bound for chernoff and lemma checks
  double err = 0;
  double std_err = 0;
  u64 seeds = 0;
  std::string mode;
  bool pass = false;
  std::string refusal;  // non-empty when the instance was refused
  json detail = json::object();
};

struct CampaignResult {
  json header;
  std::vector<InstanceResult> rows;
  json summary;
  bool pass = true;
};

// Campaign document: {name, family, generator, m, n, eps, instances, rng_seed, settings,
// tolerance: {within_target, max_err}, params}. Families: shapes, halfspaces,
// gen-halfspaces, modular, comb-shapes, chernoff, metric-lemmas, robp. The overrides are
// applied after the campaign's own settings. Report lines go to sink in instance order.
CampaignResult run_campaign(const json& campaign, const std::vector<std::pair<std::string, std::string>>& overrides,
                            unsigned threads, const std::function<void(const std::string&)>& sink);

json instance_to_json(const InstanceResult& r, const std::string& campaign);

// fprg gen | verify | report. Returns the exit code: 0 pass, 1 fail or refusal, 2 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fprg
