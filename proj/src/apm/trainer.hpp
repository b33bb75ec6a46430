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

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "apm/data.hpp"
#include "apm/errors.hpp"
#include "apm/model.hpp"
#include "apm/objectives.hpp"
#include "apm/optimizer.hpp"
#include "apm/vae.hpp"

namespace apm {

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 0.01;
  int batch_size = 32;
  int epochs = 6;
  std::uint64_t seed = 0;
  std::int64_t warmup_steps = 2000;
  double lambda_final = 0.6;
  double beta_mag = 0.6;
  double delta = 0.15;
  int pm_steps_per_main = 1;
  std::int64_t eval_every = 100;
  int checkpoint_top_k = 2;
  std::int64_t log_every = 50;

  void Validate() const;
  LambdaSchedule schedule() const { return {warmup_steps, lambda_final}; }
};

struct HistoryRow {
  std::int64_t step = 0;
  LossBundle losses;
  std::optional<double> dev_acc;
};

struct TrainHistory {
  std::vector<HistoryRow> rows;

  // Header: step,l_base,l_dip,l_pm,l_pred,total,lambda,dev_acc
  std::string ToCsv() const;
};

struct OptimizerSnapshot {
  std::int64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

struct Checkpoint {
  Model model;
  OptimizerSnapshot main_optimizer;
  OptimizerSnapshot pm_optimizer;
  std::int64_t step = -1;  // -1 for the untrained model
  double dev_acc = std::numeric_limits<double>::quiet_NaN();
  double delta = 0.0;      // mixture weight used for inference
  std::uint64_t config_hash = 0;
  std::vector<std::string> vocab;
  std::vector<std::string> label_names;
};

struct TrainResult {
  std::vector<Checkpoint> checkpoints;  // top-k by dev accuracy, best first
  TrainHistory history;
};

// Raised when a loss turns non-finite; carries the history up to the failure.
class TrainingAborted : public Error {
 public:
  TrainingAborted(const std::string& message, TrainHistory history)
      : Error(ErrorKind::kNumeric, message), history_(std::move(history)) {}
  const TrainHistory& history() const { return history_; }

 private:
  TrainHistory history_;
};

// Loss components a main step includes. Excluded components contribute
// neither to the bundle nor to gradients.
struct ComponentMask {
  bool base = true;
  bool dip = true;
  bool pm = true;
  bool pred = true;
};

// One model plus its two optimizers: the main optimizer owns every group but
// pm, the PM optimizer owns only pm.
class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& config, const VaeConfig& vae = {});

  // CausalAPM: base, dip, pm(β=−1) and pred with λ(step), gated backward,
  // update of all non-pm groups. Baselines: their single loss.
  LossBundle MainStep(const Batch& batch, std::int64_t step, const ComponentMask& mask = {});
  // Predictor update against latents detached from the encoder; returns L_PM ≥ 0.
  double PmStep(const Batch& batch);

  // Loss of the PM predictor on `batch` without touching any state.
  double PmError(const Batch& batch);

  Model& model() { return *model_; }
  AdamW& main_optimizer() { return main_opt_; }
  AdamW& pm_optimizer() { return pm_opt_; }
  const GradientGate& gate() const { return gate_; }

 private:
  Model* model_;
  TrainConfig config_;
  VaeConfig vae_;
  GradientGate gate_;
  AdamW main_opt_;
  AdamW pm_opt_;
};

TrainResult Train(const Corpus& corpus, const ModelConfig& model_config,
                  const TrainConfig& config, const VaeConfig& vae = {});

// Steps of the k evaluated rows with the highest dev accuracy, best first;
// ties go to the later step. Throws kState when nothing was evaluated.
std::vector<std::int64_t> SelectCheckpoints(const TrainHistory& history, int k = 2);

Checkpoint SnapshotCheckpoint(Trainer& trainer, const Corpus& corpus, std::int64_t step,
                              double dev_acc, double delta);

}  // namespace apm
