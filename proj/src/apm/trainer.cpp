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

#include "apm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "apm/eval.hpp"
#include "apm/format.hpp"
#include "apm/rng.hpp"

namespace apm {
namespace {

AdamWOptions OptimizerOptions(const TrainConfig& c) {
  AdamWOptions o;
  o.lr = c.lr;
  o.weight_decay = c.weight_decay;
  return o;
}

OptimizerSnapshot Snapshot(const AdamW& opt) {
  return {opt.step_count(), opt.first_moments(), opt.second_moments()};
}

// Orders (dev_acc, step) pairs best first: higher accuracy, then later step.
bool BetterEval(double acc_a, std::int64_t step_a, double acc_b, std::int64_t step_b) {
  if (acc_a != acc_b) return acc_a > acc_b;
  return step_a > step_b;
}

}  // namespace

void TrainConfig::Validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) Fail(ErrorKind::kConfig, std::string("train config: ") + msg);
  };
  need(lr > 0.0, "lr must be positive");
  need(weight_decay >= 0.0, "weight_decay must be non-negative");
  need(batch_size > 0, "batch_size must be positive");
  need(epochs >= 0, "epochs must be non-negative");
  need(warmup_steps >= 0, "warmup_steps must be non-negative");
  need(lambda_final >= 0.0, "lambda_final must be non-negative");
  need(beta_mag >= 0.0, "beta_mag must be non-negative");
  need(delta >= 0.0, "delta must be non-negative");
  need(pm_steps_per_main >= 0, "pm_steps_per_main must be non-negative");
  need(eval_every > 0, "eval_every must be positive");
  need(checkpoint_top_k > 0, "checkpoint_top_k must be positive");
  need(log_every > 0, "log_every must be positive");
}

std::string TrainHistory::ToCsv() const {
  std::ostringstream os;
  os << "step,l_base,l_dip,l_pm,l_pred,total,lambda,dev_acc\n";
  for (const auto& r : rows) {
    const auto& l = r.losses;
    os << r.step << ',' << FormatDouble(l.l_base) << ',' << FormatDouble(l.l_dip) << ','
       << FormatDouble(l.l_pm) << ',' << FormatDouble(l.l_pred) << ',' << FormatDouble(l.total)
       << ',' << FormatDouble(l.lambda) << ',';
    if (r.dev_acc) os << FormatDouble(*r.dev_acc);
    os << '\n';
  }
  return os.str();
}

Trainer::Trainer(Model& model, const TrainConfig& config, const VaeConfig& vae)
    : model_(&model),
      config_(config),
      vae_(vae),
      gate_(GradientGate::Default()),
      main_opt_(model.params(), GroupSet::AllExcept(Group::kPm), OptimizerOptions(config)),
      pm_opt_(model.params(), GroupSet{Group::kPm}, OptimizerOptions(config)) {
  config_.Validate();
}

LossBundle Trainer::MainStep(const Batch& batch, std::int64_t step, const ComponentMask& mask) {
  Model& m = *model_;
  m.params().ZeroGrad();
  LossBundle bundle;

  switch (m.config().method) {
    case Method::kCausalApm: {
      ApmForward f = m.ForwardApm(batch);
      LossTerms terms;
      if (mask.base) terms.base = LossBase(f.r, f.r_prime, f.pred1, batch.labels);
      if (mask.dip) terms.dip = LossDip(f.s_prime, batch.overlap);
      if (mask.pm) terms.pm = LossPm(m.PmPredict(f.z1), f.z2, -1, config_.beta_mag);
      if (mask.pred) terms.pred = LossPred(f.pred2, f.pred3, batch.labels, config_.delta);
      auto value = [](const Var& v) { return v ? v->value.item() : 0.0; };
      const double lambda = config_.schedule()(step);
      bundle = Combine(value(terms.base), value(terms.dip), value(terms.pm), value(terms.pred),
                       lambda);
      bundle.delta = config_.delta;
      bundle.beta_sign = -1;
      bundle.beta_mag = config_.beta_mag;
      bundle.step = step;
      if (!bundle.AllFinite()) Fail(ErrorKind::kNumeric, "non-finite loss at " + bundle.Describe());
      ApplyGates(terms, bundle, gate_);
      break;
    }
    case Method::kErm: {
      Var loss = SoftmaxCrossEntropy(m.ForwardErmLogits(batch), batch.labels);
      bundle = Combine(loss->value.item(), 0.0, 0.0, 0.0, 0.0);
      bundle.step = step;
      if (!bundle.AllFinite()) Fail(ErrorKind::kNumeric, "non-finite loss at " + bundle.Describe());
      Backward(loss, GroupSet::AllExcept(Group::kPm));
      break;
    }
    case Method::kBetaVae: {
      const auto rows = batch.rows();
      Tensor noise(rows, static_cast<std::size_t>(m.config().z_dim));
      Rng rng = Rng::Substream(config_.seed, "vae-noise", static_cast<std::uint64_t>(step));
      for (double& x : noise.data()) x = rng.Normal();
      VaeTerms t = VaeLoss(m, batch, noise, vae_);
      const double kl = t.kl ? t.kl->value.item() : 0.0;
      bundle = Combine(t.ce->value.item() + vae_.recon_weight * t.recon->value.item(), 0.0, 0.0,
                       0.0, 0.0);
      bundle.total = t.total->value.item();
      bundle.step = step;
      if (!bundle.AllFinite() || !std::isfinite(kl)) {
        Fail(ErrorKind::kNumeric, "non-finite loss (kl=" + FormatDouble(kl) + ") at " +
                                      bundle.Describe());
      }
      Backward(t.total, GroupSet::AllExcept(Group::kPm));
      break;
    }
  }
  main_opt_.Step();
  return bundle;
}

double Trainer::PmStep(const Batch& batch) {
  Model& m = *model_;
  if (m.config().method != Method::kCausalApm) {
    Fail(ErrorKind::kState, "PM step on a model without a PM predictor");
  }
  m.params().ZeroGrad(GroupSet{Group::kPm});
  auto [z1, z2] = m.Latents(batch);
  Var loss = LossPm(m.PmPredict(Constant(std::move(z1))), Constant(std::move(z2)), +1,
                    config_.beta_mag);
  const double value = loss->value.item();
  if (!std::isfinite(value)) Fail(ErrorKind::kNumeric, "non-finite PM loss");
  Backward(loss, gate_.Allowed(Component::kPmTrain));
  pm_opt_.Step();
  return value;
}

double Trainer::PmError(const Batch& batch) {
  Model& m = *model_;
  auto [z1, z2] = m.Latents(batch);
  return Mse(m.PmPredict(Constant(std::move(z1))), Constant(std::move(z2)))->value.item();
}

Checkpoint SnapshotCheckpoint(Trainer& trainer, const Corpus& corpus, std::int64_t step,
                              double dev_acc, double delta) {
  Checkpoint c;
  c.model = trainer.model();
  c.main_optimizer = Snapshot(trainer.main_optimizer());
  c.pm_optimizer = Snapshot(trainer.pm_optimizer());
  c.step = step;
  c.dev_acc = dev_acc;
  c.delta = delta;
  c.vocab = corpus.vocab.tokens();
  c.label_names = corpus.label_names;
  return c;
}

TrainResult Train(const Corpus& corpus, const ModelConfig& model_config,
                  const TrainConfig& config, const VaeConfig& vae) {
  config.Validate();
  const auto& train = corpus.split(Split::kTrain);
  const auto& dev = corpus.split(Split::kDev);
  if (train.empty() || dev.empty()) {
    Fail(ErrorKind::kInput, "training needs non-empty train and dev splits");
  }
  ModelConfig mc = model_config;
  mc.vocab_size = static_cast<int>(corpus.vocab.size());
  mc.num_labels = corpus.num_labels;
  Model model(mc, config.seed);
  Trainer trainer(model, config, vae);
  const double delta = mc.method == Method::kCausalApm ? config.delta : 0.0;

  TrainResult result;
  if (config.epochs == 0) {
    result.checkpoints.push_back(
        SnapshotCheckpoint(trainer, corpus, -1, Accuracy(model, dev, delta), delta));
    return result;
  }

  const std::size_t n = train.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t per_epoch = (n + batch - 1) / batch;
  const auto total_steps = static_cast<std::int64_t>(per_epoch) * config.epochs;
  const auto k = static_cast<std::size_t>(config.checkpoint_top_k);

  std::vector<std::size_t> order(n);
  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = Rng::Substream(config.seed, "data-order", static_cast<std::uint64_t>(epoch));
    shuffle.Shuffle(order);
    for (std::size_t lo = 0; lo < n; lo += batch, ++step) {
      const std::size_t hi = std::min(n, lo + batch);
      Batch b = MakeBatch(train, std::span<const std::size_t>(order).subspan(lo, hi - lo));
      LossBundle bundle;
      try {
        bundle = trainer.MainStep(b, step);
        if (mc.method == Method::kCausalApm) {
          for (int r = 0; r < config.pm_steps_per_main; ++r) trainer.PmStep(b);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumeric) throw;
        throw TrainingAborted("step " + std::to_string(step) + ": " + e.what(), result.history);
      }

      const bool last = step + 1 == total_steps;
      const bool evaluate = (step + 1) % config.eval_every == 0 || last;
      const bool log = evaluate || (step + 1) % config.log_every == 0;
      if (!log) continue;
      HistoryRow row{step, bundle, std::nullopt};
      if (evaluate) {
        const double acc = Accuracy(model, dev, delta);
        row.dev_acc = acc;
        const bool qualifies =
            result.checkpoints.size() < k ||
            BetterEval(acc, step, result.checkpoints.back().dev_acc,
                       result.checkpoints.back().step);
        if (qualifies) {
          result.checkpoints.push_back(SnapshotCheckpoint(trainer, corpus, step, acc, delta));
          std::stable_sort(result.checkpoints.begin(), result.checkpoints.end(),
                           [](const Checkpoint& a, const Checkpoint& b) {
                             return BetterEval(a.dev_acc, a.step, b.dev_acc, b.step);
                           });
          if (result.checkpoints.size() > k) result.checkpoints.resize(k);
        }
      }
      result.history.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::vector<std::int64_t> SelectCheckpoints(const TrainHistory& history, int k) {
  if (k <= 0) Fail(ErrorKind::kInput, "k must be positive");
  std::vector<const HistoryRow*> evaluated;
  for (const auto& r : history.rows) {
    if (r.dev_acc) evaluated.push_back(&r);
  }
  if (evaluated.empty()) Fail(ErrorKind::kState, "no evaluations to select checkpoints from");
  std::stable_sort(evaluated.begin(), evaluated.end(), [](const HistoryRow* a, const HistoryRow* b) {
    return BetterEval(*a->dev_acc, a->step, *b->dev_acc, b->step);
  });
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < evaluated.size() && i < static_cast<std::size_t>(k); ++i) {
    out.push_back(evaluated[i]->step);
  }
  return out;
}

}  // namespace apm
