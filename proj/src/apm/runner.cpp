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

#include "apm/runner.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "apm/baselines.hpp"
#include "apm/checkpoint.hpp"
#include "apm/eval.hpp"
#include "apm/format.hpp"
#include "apm/hash.hpp"
#include "apm/sweep.hpp"
#include "json.hpp"

namespace apm {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::array<Split, 3> kEvalSplits = {Split::kDev, Split::kIdTest, Split::kOodTest};

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

void Prepare(const RunConfig& config, const fs::path& out) {
  config.Validate();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create " + out.string() + ": " + ec.message());
  WriteText(out / "config.txt",
            config.Echo() + "# config_hash = " + HashHex(config.Hash()) + "\n");
}

json Number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json Number(const std::optional<double>& x) { return x ? Number(*x) : json(nullptr); }

std::optional<double> LatentDependence(Model& model, const std::vector<PairExample>& split) {
  if (model.config().method == Method::kErm || split.empty()) return std::nullopt;
  const auto rows = split.size();
  if (rows < 10 * static_cast<std::size_t>(model.config().z1_dim())) return std::nullopt;
  auto [z1, z2] = model.Latents(MakeBatch(split));
  return MiProxy(z1, z2);
}

// Accuracy per split, tendency curves and dependence proxy of one model.
json Evaluate(Model& model, const Corpus& corpus, double delta, const RunConfig& config,
              const fs::path& out) {
  json j;
  j["delta"] = delta;
  std::optional<double> id, ood;
  for (Split s : kEvalSplits) {
    const auto& ex = corpus.split(s);
    if (ex.empty()) continue;
    const auto pred = Predict(model, ex, delta);
    const double acc = AccuracyOf(ex, pred);
    j[std::string(SplitName(s)) + "_acc"] = acc;
    if (s == Split::kIdTest) id = acc;
    if (s == Split::kOodTest) ood = acc;
    const auto curve = TendencyFromPredictions(ex, pred, corpus.label_names,
                                               static_cast<std::size_t>(config.eval.bins));
    WriteText(out / ("curves_" + std::string(SplitName(s)) + ".csv"), curve.ToCsv());
    j[std::string(SplitName(s)) + "_bias_spread"] =
        TopMinusBottomSpread(curve, config.data.bias_label);
  }
  j["id_ood_gap"] = id && ood ? json(*id - *ood) : json(nullptr);
  j["mi_proxy"] = Number(LatentDependence(model, corpus.split(Split::kIdTest)));
  return j;
}

std::string Iso8601Now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

RunLog::RunLog(const fs::path& out_dir, bool echo_stderr) : echo_(echo_stderr) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  file_.open(out_dir / "run.log", std::ios::app);
}

void RunLog::Info(const std::string& command, const std::string& message) {
  const std::string line = Iso8601Now() + " [" + command + "] " + message;
  if (file_) file_ << line << '\n' << std::flush;
  if (echo_) std::cerr << line << '\n';
}

Corpus ResolveCorpus(const RunConfig& config, const LoadOptions& options) {
  if (!config.corpus.empty()) return LoadCorpus(config.corpus, options);
  Corpus c = GenerateCorpus(config.data);
  if (options.vocab != nullptr && options.vocab->Hash() != c.vocab.Hash()) {
    Fail(ErrorKind::kConfig, "vocabulary hash mismatch: model expects " +
                                 HashHex(options.vocab->Hash()) + ", generated corpus has " +
                                 HashHex(c.vocab.Hash()));
  }
  return c;
}

void CmdSynth(const RunConfig& config, const fs::path& out, bool verbose) {
  Prepare(config, out);
  RunLog log(out, verbose);
  log.Info("synth", "config_hash=" + HashHex(config.Hash()));
  const Corpus corpus = GenerateCorpus(config.data);
  WriteCorpus(out, corpus, &config.data);
  log.Info("synth", "wrote " + std::to_string(corpus.TotalSize()) + " examples, content_hash=" +
                        HashHex(corpus.ContentHash()));
}

void CmdTrain(const RunConfig& config, const fs::path& out, bool verbose) {
  Prepare(config, out);
  RunLog log(out, verbose);
  const Corpus corpus = ResolveCorpus(config);
  log.Info("train", std::string("method=") + MethodName(config.method) + " config_hash=" +
                        HashHex(config.Hash()) + " corpus_hash=" + HashHex(corpus.ContentHash()));

  ModelConfig mc = config.ResolvedModel();
  TrainResult result;
  try {
    switch (config.method) {
      case Method::kCausalApm: result = Train(corpus, mc, config.train); break;
      case Method::kErm: result = TrainErm(corpus, mc, config.train); break;
      case Method::kBetaVae: result = TrainBetaVae(corpus, mc, config.train, config.vae); break;
    }
  } catch (const TrainingAborted& e) {
    WriteText(out / "history.csv", e.history().ToCsv());
    log.Info("train", std::string("aborted: ") + e.what());
    throw;
  }
  WriteText(out / "history.csv", result.history.ToCsv());

  json metrics;
  metrics["method"] = MethodName(config.method);
  metrics["config_hash"] = HashHex(config.Hash());
  metrics["corpus_hash"] = HashHex(corpus.ContentHash());
  json ckpts = json::array();
  for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
    Checkpoint& c = result.checkpoints[i];
    c.config_hash = config.Hash();
    const std::string name = "ckpt_top" + std::to_string(i + 1) + ".bin";
    SaveCheckpoint(out / name, c);
    json cj;
    cj["file"] = name;
    cj["step"] = c.step;
    cj["dev_acc"] = Number(c.dev_acc);
    cj["id_test_acc"] = Accuracy(c.model, corpus.split(Split::kIdTest), c.delta);
    cj["ood_test_acc"] = Accuracy(c.model, corpus.split(Split::kOodTest), c.delta);
    ckpts.push_back(cj);
  }
  metrics["checkpoints"] = ckpts;
  Checkpoint& best = result.checkpoints.front();
  metrics["selected"] = "ckpt_top1.bin";
  metrics["selected_step"] = best.step;
  metrics["eval"] = Evaluate(best.model, corpus, best.delta, config, out);
  WriteText(out / "metrics.json", metrics.dump(2) + "\n");
  log.Info("train", "done: " + std::to_string(result.history.rows.size()) +
                        " history rows, best step " + std::to_string(best.step) + " dev_acc " +
                        FormatDouble(best.dev_acc));
}

void CmdEval(const RunConfig& config, const fs::path& checkpoint, const fs::path& out,
             bool verbose) {
  Prepare(config, out);
  RunLog log(out, verbose);
  Checkpoint ckpt = LoadCheckpoint(checkpoint);
  const Vocabulary vocab = Vocabulary::FromTokens(ckpt.vocab);
  LoadOptions opts;
  opts.vocab = &vocab;
  if (!ckpt.label_names.empty()) opts.label_names = ckpt.label_names;
  const Corpus corpus = ResolveCorpus(config, opts);
  if (corpus.num_labels != ckpt.model.config().num_labels) {
    Fail(ErrorKind::kConfig, "corpus has " + std::to_string(corpus.num_labels) +
                                 " labels, checkpoint expects " +
                                 std::to_string(ckpt.model.config().num_labels));
  }
  const double delta = config.eval.delta.value_or(ckpt.delta);
  log.Info("eval", "checkpoint=" + checkpoint.string() + " step=" + std::to_string(ckpt.step) +
                       " delta=" + FormatDouble(delta));
  json metrics;
  metrics["method"] = MethodName(ckpt.model.config().method);
  metrics["checkpoint_step"] = ckpt.step;
  metrics["checkpoint_config_hash"] = HashHex(ckpt.config_hash);
  metrics["config_hash"] = HashHex(config.Hash());
  metrics["corpus_hash"] = HashHex(corpus.ContentHash());
  metrics["eval"] = Evaluate(ckpt.model, corpus, delta, config, out);
  WriteText(out / "metrics.json", metrics.dump(2) + "\n");
  log.Info("eval", "done");
}

void CmdSweep(const RunConfig& config, const fs::path& out, bool verbose) {
  Prepare(config, out);
  RunLog log(out, verbose);
  const Corpus corpus = ResolveCorpus(config);
  log.Info("sweep", "config_hash=" + HashHex(config.Hash()) + " corpus_hash=" +
                        HashHex(corpus.ContentHash()));
  const SweepResult result = RunSweep(corpus, config);
  WriteText(out / "sweep.csv", result.ToCsv());
  json meta;
  meta["mode"] = result.mode == SweepMode::kRetrain ? "retrain" : "inference_only";
  meta["config_hash"] = HashHex(config.Hash());
  meta["corpus_hash"] = HashHex(corpus.ContentHash());
  meta["cells"] = result.cells.size();
  meta["ablation_cells"] = std::count_if(result.cells.begin(), result.cells.end(),
                                         [](const SweepCell& c) { return c.ablation; });
  WriteText(out / "sweep_meta.json", meta.dump(2) + "\n");
  log.Info("sweep", "done: " + std::to_string(result.cells.size()) + " cells");
}

void CmdAudit(const RunConfig& config, const std::optional<fs::path>& checkpoint,
              const fs::path& out, bool verbose) {
  Prepare(config, out);
  RunLog log(out, verbose);
  const auto bins = static_cast<std::size_t>(config.eval.bins);
  if (!checkpoint) {
    const Corpus corpus = ResolveCorpus(config);
    for (Split s : kAllSplits) {
      const auto& ex = corpus.split(s);
      if (ex.empty()) continue;
      WriteText(out / ("audit_" + std::string(SplitName(s)) + ".csv"),
                GoldTendency(ex, corpus.label_names, bins).ToCsv());
    }
    log.Info("audit", "corpus audit written");
    return;
  }
  Checkpoint ckpt = LoadCheckpoint(*checkpoint);
  const Vocabulary vocab = Vocabulary::FromTokens(ckpt.vocab);
  LoadOptions opts;
  opts.vocab = &vocab;
  if (!ckpt.label_names.empty()) opts.label_names = ckpt.label_names;
  const Corpus corpus = ResolveCorpus(config, opts);
  const double delta = config.eval.delta.value_or(ckpt.delta);
  for (Split s : kAllSplits) {
    const auto& ex = corpus.split(s);
    if (ex.empty()) continue;
    WriteText(out / ("audit_" + std::string(SplitName(s)) + ".csv"),
              ComputeTendencyCurve(ckpt.model, ex, corpus.label_names, bins, delta).ToCsv());
  }
  log.Info("audit", "model audit written for " + checkpoint->string());
}

}  // namespace apm
