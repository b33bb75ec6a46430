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

#include "apm/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "apm/format.hpp"
#include "apm/hash.hpp"

namespace apm {
namespace {

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void BadValue(const std::string& key, const std::string& value, const char* want) {
  Fail(ErrorKind::kConfig, "config key '" + key + "': expected " + want + ", got '" + value + "'");
}

template <typename T>
T ParseInteger(const std::string& key, const std::string& value) {
  T v{};
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    BadValue(key, value, "an integer");
  }
  return v;
}

double ParseReal(const std::string& key, const std::string& value) {
  try {
    return ParseDouble(value);
  } catch (const Error&) {
    BadValue(key, value, "a number");
  }
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  BadValue(key, value, "true or false");
}

template <typename Join, typename T>
std::string JoinList(const std::vector<T>& xs, Join fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

template <typename T, typename Access>
Field IntField(std::string key, Access access) {
  return {key,
          [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const std::string& v) { access(c) = ParseInteger<T>(key, v); }};
}

template <typename Access>
Field RealField(std::string key, Access access) {
  return {key,
          [access](const RunConfig& c) { return FormatDouble(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const std::string& v) { access(c) = ParseReal(key, v); }};
}

template <typename Access>
Field BoolField(std::string key, Access access) {
  return {key,
          [access](const RunConfig& c) {
            return std::string(access(const_cast<RunConfig&>(c)) ? "true" : "false");
          },
          [access, key](RunConfig& c, const std::string& v) { access(c) = ParseBool(key, v); }};
}

#define APM_INT(T, key, expr) IntField<T>(key, [](RunConfig& c) -> T& { return expr; })
#define APM_REAL(key, expr) RealField(key, [](RunConfig& c) -> double& { return expr; })
#define APM_BOOL(key, expr) BoolField(key, [](RunConfig& c) -> bool& { return expr; })

const std::vector<Field>& Schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back({"method", [](const RunConfig& c) { return std::string(MethodName(c.method)); },
                 [](RunConfig& c, const std::string& v) { c.method = MethodFromName(v); }});
    f.push_back({"corpus", [](const RunConfig& c) { return c.corpus; },
                 [](RunConfig& c, const std::string& v) { c.corpus = v; }});

    f.push_back(APM_INT(int, "data.vocab_size", c.data.vocab_size));
    f.push_back(APM_INT(int, "data.num_labels", c.data.num_labels));
    f.push_back(APM_INT(int, "data.len1_min", c.data.len1_min));
    f.push_back(APM_INT(int, "data.len1_max", c.data.len1_max));
    f.push_back(APM_INT(int, "data.len2_min", c.data.len2_min));
    f.push_back(APM_INT(int, "data.len2_max", c.data.len2_max));
    f.push_back(APM_INT(int, "data.bias_label", c.data.bias_label));
    f.push_back(APM_REAL("data.bias_strength", c.data.bias_strength));
    f.push_back(APM_REAL("data.overlap_threshold", c.data.overlap_threshold));
    f.push_back(APM_REAL("data.high_overlap_rate", c.data.high_overlap_rate));
    f.push_back(APM_REAL("data.ood_high_overlap_rate", c.data.ood_high_overlap_rate));
    f.push_back(APM_REAL("data.semantic_reliability", c.data.semantic_reliability));
    f.push_back(APM_INT(int, "data.pattern_tokens_per_label", c.data.pattern_tokens_per_label));
    f.push_back(APM_INT(int, "data.n_train", c.data.n_train));
    f.push_back(APM_INT(int, "data.n_dev", c.data.n_dev));
    f.push_back(APM_INT(int, "data.n_id_test", c.data.n_id_test));
    f.push_back(APM_INT(int, "data.n_ood_test", c.data.n_ood_test));
    f.push_back(APM_INT(std::uint64_t, "data.seed", c.data.seed));

    f.push_back(APM_INT(int, "model.emb_dim", c.model.emb_dim));
    f.push_back(APM_INT(int, "model.z_dim", c.model.z_dim));
    f.push_back(APM_INT(int, "model.z2_dim", c.model.z2_dim));
    f.push_back(APM_INT(int, "model.lip_hidden", c.model.lip_hidden));
    f.push_back(APM_INT(int, "model.pm_hidden", c.model.pm_hidden));

    f.push_back(APM_REAL("train.lr", c.train.lr));
    f.push_back(APM_REAL("train.weight_decay", c.train.weight_decay));
    f.push_back(APM_INT(int, "train.batch_size", c.train.batch_size));
    f.push_back(APM_INT(int, "train.epochs", c.train.epochs));
    f.push_back(APM_INT(std::uint64_t, "train.seed", c.train.seed));
    f.push_back(APM_INT(std::int64_t, "train.warmup_steps", c.train.warmup_steps));
    f.push_back(APM_REAL("train.lambda_final", c.train.lambda_final));
    f.push_back(APM_REAL("train.beta_mag", c.train.beta_mag));
    f.push_back(APM_REAL("train.delta", c.train.delta));
    f.push_back(APM_INT(int, "train.pm_steps_per_main", c.train.pm_steps_per_main));
    f.push_back(APM_INT(std::int64_t, "train.eval_every", c.train.eval_every));
    f.push_back(APM_INT(int, "train.checkpoint_top_k", c.train.checkpoint_top_k));
    f.push_back(APM_INT(std::int64_t, "train.log_every", c.train.log_every));

    f.push_back(APM_REAL("vae.beta_vae", c.vae.beta_vae));
    f.push_back(APM_REAL("vae.recon_weight", c.vae.recon_weight));
    f.push_back(APM_BOOL("vae.deterministic", c.vae.deterministic));

    f.push_back(APM_INT(int, "eval.bins", c.eval.bins));
    f.push_back({"eval.delta",
                 [](const RunConfig& c) {
                   return c.eval.delta ? FormatDouble(*c.eval.delta) : std::string();
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v.empty()) {
                     c.eval.delta.reset();
                   } else {
                     c.eval.delta = ParseReal("eval.delta", v);
                   }
                 }});

    f.push_back({"sweep.deltas",
                 [](const RunConfig& c) { return JoinList(c.sweep.deltas, FormatDouble); },
                 [](RunConfig& c, const std::string& v) { c.sweep.deltas = ParseDoubleList(v); }});
    f.push_back({"sweep.z2_dims",
                 [](const RunConfig& c) {
                   return JoinList(c.sweep.z2_dims, [](int x) { return std::to_string(x); });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.sweep.z2_dims.clear();
                   for (const auto& s : SplitString(v, ',')) {
                     c.sweep.z2_dims.push_back(ParseInteger<int>("sweep.z2_dims", std::string(Trim(s))));
                   }
                 }});
    f.push_back({"sweep.seeds",
                 [](const RunConfig& c) {
                   return JoinList(c.sweep.seeds, [](std::uint64_t x) { return std::to_string(x); });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.sweep.seeds.clear();
                   for (const auto& s : SplitString(v, ',')) {
                     c.sweep.seeds.push_back(
                         ParseInteger<std::uint64_t>("sweep.seeds", std::string(Trim(s))));
                   }
                 }});
    f.push_back(APM_BOOL("sweep.ablation", c.sweep.ablation));
    f.push_back({"sweep.mode",
                 [](const RunConfig& c) {
                   return std::string(c.sweep.mode == SweepMode::kRetrain ? "retrain"
                                                                          : "inference_only");
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "retrain") {
                     c.sweep.mode = SweepMode::kRetrain;
                   } else if (v == "inference_only") {
                     c.sweep.mode = SweepMode::kInferenceOnly;
                   } else {
                     BadValue("sweep.mode", v, "retrain or inference_only");
                   }
                 }});
    f.push_back(APM_INT(int, "sweep.threads", c.sweep.threads));
    return f;
  }();
  return fields;
}

#undef APM_INT
#undef APM_REAL
#undef APM_BOOL

const Field& Lookup(const std::string& key) {
  for (const auto& f : Schema()) {
    if (f.key == key) return f;
  }
  Fail(ErrorKind::kConfig, "unknown config key '" + key + "'");
}

}  // namespace

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : SplitString(text, ',')) {
    const std::string item(Trim(s));
    if (item.empty()) Fail(ErrorKind::kConfig, "empty entry in list '" + text + "'");
    try {
      out.push_back(ParseDouble(item));
    } catch (const Error&) {
      Fail(ErrorKind::kConfig, "not a number in list: '" + item + "'");
    }
  }
  return out;
}

void RunConfig::Set(const std::string& key, const std::string& value) {
  try {
    Lookup(key).set(*this, value);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    Fail(ErrorKind::kConfig, e.what());
  }
}

std::string RunConfig::Get(const std::string& key) const { return Lookup(key).get(*this); }

const std::vector<std::string>& RunConfig::Keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Schema()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

std::string RunConfig::Echo() const {
  std::string out;
  for (const auto& f : Schema()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

std::uint64_t RunConfig::Hash() const { return Fnv1a64(Echo()); }

ModelConfig RunConfig::ResolvedModel() const {
  ModelConfig m = model;
  m.method = method;
  m.vocab_size = data.vocab_size;
  m.num_labels = data.num_labels;
  return m;
}

void RunConfig::Validate() const {
  if (corpus.empty()) data.Validate();
  ResolvedModel().Validate();
  train.Validate();
  if (vae.beta_vae < 0.0) Fail(ErrorKind::kConfig, "vae.beta_vae must be non-negative");
  if (eval.bins < 2) Fail(ErrorKind::kConfig, "eval.bins must be at least 2");
  if (eval.delta && *eval.delta < 0.0) Fail(ErrorKind::kConfig, "eval.delta must be non-negative");
  if (sweep.deltas.empty() || sweep.z2_dims.empty() || sweep.seeds.empty()) {
    Fail(ErrorKind::kConfig, "sweep grids must be non-empty");
  }
  for (double d : sweep.deltas) {
    if (!(d >= 0.0)) Fail(ErrorKind::kConfig, "sweep.deltas must be non-negative");
  }
  for (int d : sweep.z2_dims) {
    if (d <= 0 || d >= model.z_dim) Fail(ErrorKind::kConfig, "sweep.z2_dims must lie in (0, z_dim)");
  }
  if (sweep.threads < 0) Fail(ErrorKind::kConfig, "sweep.threads must be non-negative");
}

RunConfig ParseRunConfig(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view body = Trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) {
      Fail(ErrorKind::kConfig, where + ": expected 'key = value'");
    }
    const std::string key(Trim(body.substr(0, eq)));
    const std::string value(Trim(body.substr(eq + 1)));
    if (!seen.insert(key).second) Fail(ErrorKind::kConfig, where + ": duplicate key '" + key + "'");
    try {
      cfg.Set(key, value);
    } catch (const Error& e) {
      Fail(ErrorKind::kConfig, where + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kConfig, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path.string());
}

}  // namespace apm
