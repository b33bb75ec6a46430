// Copyright 2026 The apm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apm/apm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int ExitCode(apm_status s) {
  if (s == APM_OK) return kExitOk;
  if (s == APM_E_CONFIG || s == APM_E_ARGUMENT) return kExitUsage;
  return kExitRuntime;
}

int Report(apm_status s, const char* what) {
  if (s != APM_OK) {
    std::fprintf(stderr, "apm %s: %s: %s\n", what, apm_status_name(s), apm_last_error());
  }
  return ExitCode(s);
}

struct Options {
  std::string config;
  std::string out = "out";
  std::string corpus;
  std::string checkpoint;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<double> delta;
  std::optional<int> z2_dim;
  std::optional<double> lambda_final;
  std::optional<long long> warmup_steps;
  std::optional<int> bins;
  std::optional<std::string> grid;
  bool verbose = false;
};

class ConfigHandle {
 public:
  ~ConfigHandle() { apm_config_destroy(cfg_); }
  apm_status Init(const std::string& path) {
    return path.empty() ? apm_config_create(&cfg_) : apm_config_load(path.c_str(), &cfg_);
  }
  apm_status Set(const std::string& key, const std::string& value) {
    return apm_config_set(cfg_, key.c_str(), value.c_str());
  }
  apm_config* get() { return cfg_; }

 private:
  apm_config* cfg_ = nullptr;
};

std::string Num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Resolves file config, --set overrides, then dedicated flags.
apm_status BuildConfig(const std::string& command, const Options& o, ConfigHandle& h) {
  apm_status s = h.Init(o.config);
  if (s != APM_OK) return s;
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& a : o.sets) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "apm %s: --set expects key=value, got '%s'\n", command.c_str(),
                   a.c_str());
      return APM_E_CONFIG;
    }
    kv.emplace_back(a.substr(0, eq), a.substr(eq + 1));
  }
  if (!o.corpus.empty()) kv.emplace_back("corpus", o.corpus);
  if (o.seed) {
    const char* key = command == "synth"   ? "data.seed"
                      : command == "sweep" ? "sweep.seeds"
                                           : "train.seed";
    kv.emplace_back(key, std::to_string(*o.seed));
  }
  if (o.method) kv.emplace_back("method", *o.method);
  if (o.delta) kv.emplace_back(command == "train" || command == "sweep" ? "train.delta" : "eval.delta",
                               Num(*o.delta));
  if (o.z2_dim) {
    kv.emplace_back(command == "sweep" ? "sweep.z2_dims" : "model.z2_dim", std::to_string(*o.z2_dim));
  }
  if (o.lambda_final) kv.emplace_back("train.lambda_final", Num(*o.lambda_final));
  if (o.warmup_steps) kv.emplace_back("train.warmup_steps", std::to_string(*o.warmup_steps));
  if (o.bins) kv.emplace_back("eval.bins", std::to_string(*o.bins));
  if (o.grid) kv.emplace_back("sweep.deltas", *o.grid);
  for (const auto& [k, v] : kv) {
    s = h.Set(k, v);
    if (s != APM_OK) return s;
  }
  return apm_config_validate(h.get());
}

void AddCommon(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "Run config file (key = value lines)");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--set", o.sets, "Override one config key: key=value (repeatable)");
  sub->add_option("--seed", o.seed, "Seed (data seed for synth, base seeds for sweep)");
  sub->add_option("--bins", o.bins, "Overlap bins for curves and audits");
  sub->add_flag("-v,--verbose", o.verbose, "Mirror run.log to stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Literal/semantic disentanglement trainer and evaluator"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic biased pair corpus");
  AddCommon(synth, o);

  auto* train = app.add_subcommand("train", "Train a model and write checkpoints and metrics");
  AddCommon(train, o);
  train->add_option("--corpus", o.corpus, "Corpus directory or JSONL file");
  train->add_option("--method", o.method, "causal_apm, erm or beta_vae");
  train->add_option("--delta", o.delta, "Literal head weight in the mixture");
  train->add_option("--z2-dim", o.z2_dim, "Width of the literal latent");
  train->add_option("--lambda-final", o.lambda_final, "Disentanglement weight after warmup");
  train->add_option("--warmup-steps", o.warmup_steps, "Steps with zero disentanglement weight");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a corpus");
  AddCommon(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  eval->add_option("--corpus", o.corpus, "Corpus directory or JSONL file");
  eval->add_option("--delta", o.delta, "Override the mixture weight");

  auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep over delta and z2 width");
  AddCommon(sweep, o);
  sweep->add_option("--corpus", o.corpus, "Corpus directory or JSONL file");
  sweep->add_option("--grid", o.grid, "Comma-separated delta values");
  sweep->add_option("--z2-dim", o.z2_dim, "Restrict the sweep to one z2 width");
  sweep->add_option("--delta", o.delta, "Training delta of the ablation row");
  sweep->add_option("--lambda-final", o.lambda_final, "Disentanglement weight after warmup");
  sweep->add_option("--warmup-steps", o.warmup_steps, "Steps with zero disentanglement weight");
  sweep->add_option("--method", o.method, "Accepted for symmetry; sweeps train causal_apm");

  auto* audit = app.add_subcommand("audit", "Label-by-overlap report for a corpus or model");
  AddCommon(audit, o);
  audit->add_option("--corpus", o.corpus, "Corpus directory or JSONL file");
  audit->add_option("--checkpoint", o.checkpoint, "Checkpoint to audit predictions of");
  audit->add_option("--delta", o.delta, "Override the mixture weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  ConfigHandle h;
  apm_status s = BuildConfig(command, o, h);
  if (s != APM_OK) return Report(s, command.c_str());

  const int v = o.verbose ? 1 : 0;
  if (command == "synth") {
    s = apm_cmd_synth(h.get(), o.out.c_str(), v);
  } else if (command == "train") {
    s = apm_cmd_train(h.get(), o.out.c_str(), v);
  } else if (command == "eval") {
    s = apm_cmd_eval(h.get(), o.checkpoint.c_str(), o.out.c_str(), v);
  } else if (command == "sweep") {
    s = apm_cmd_sweep(h.get(), o.out.c_str(), v);
  } else {
    s = apm_cmd_audit(h.get(), o.checkpoint.empty() ? nullptr : o.checkpoint.c_str(),
                      o.out.c_str(), v);
  }
  return Report(s, command.c_str());
}
