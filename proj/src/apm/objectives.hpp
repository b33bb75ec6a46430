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

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

#include "apm/autograd.hpp"
#include "apm/parameter.hpp"

namespace apm {

enum class Component : std::uint8_t {
  kBase = 0,       // cross-entropy(pred1) + mse(R, R′)
  kDip,            // (S′ − S)²
  kPmAdversarial,  // β = −1: encoder defeats the predictor
  kPred,           // cross-entropy of the δ-mixture
  kPmTrain,        // β = +1: predictor update
};
inline constexpr int kNumComponents = 5;

const char* ComponentName(Component c);

struct LossBundle {
  double l_base = 0.0;
  double l_dip = 0.0;
  double l_pm = 0.0;
  double l_pred = 0.0;
  double total = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  int beta_sign = -1;
  double beta_mag = 0.0;
  std::int64_t step = 0;

  bool AllFinite() const;
  std::string Describe() const;
};

// Recorded loss components of one forward pass.
struct LossTerms {
  Var base;
  Var dip;
  Var pm;
  Var pred;
};

// Which parameter groups each loss component may write gradients into.
class GradientGate {
 public:
  // embedding ← base only; pm ← pm-train only; encoder ← base, dip, pm-adv, pred;
  // decoder, head1 ← base; head2, head3 ← pred; lip ← dip.
  static GradientGate Default();

  GroupSet Allowed(Component c) const { return allowed_[static_cast<int>(c)]; }
  void Set(Component c, GroupSet groups) { allowed_[static_cast<int>(c)] = groups; }
  // Group names are checked; unknown names raise kInput.
  void Set(Component c, std::initializer_list<std::string_view> group_names);
  // The embedding group may appear only under kBase and the pm group only
  // under kPmTrain.
  bool SatisfiesContract() const;

 private:
  std::array<GroupSet, kNumComponents> allowed_{};
};

// Mean-over-batch −log pred1[label] plus mse(R, R′).
Var LossBase(const Var& r, const Var& r_prime, const Var& pred1, std::span<const int> labels);
Var LossDip(const Var& s_prime, std::span<const double> s);
Var LossPm(const Var& z2_pred, const Var& z2, int beta_sign, double beta_mag);
// −log of the renormalized mixture (pred2 + δ·pred3)/(1 + δ) at the label.
Var LossPred(const Var& pred2, const Var& pred3, std::span<const int> labels, double delta);
Tensor MixtureScores(const Tensor& pred2, const Tensor& pred3, double delta);

struct LambdaSchedule {
  std::int64_t warmup_steps = 2000;
  double lambda_final = 0.6;

  // 0 for steps [0, warmup_steps), lambda_final afterwards.
  double operator()(std::int64_t step) const {
    return step < warmup_steps ? 0.0 : lambda_final;
  }
};

// total = l_base + λ·(l_pm + l_dip) + l_pred, evaluated once in that order.
LossBundle Combine(double l_base, double l_dip, double l_pm, double l_pred, double lambda);

// Component-wise backward: each term is propagated with its coefficient from
// the total (1 for base and pred, λ for dip and pm) and written only into the
// groups its gate allows. Terms that are null are skipped.
void ApplyGates(const LossTerms& terms, const LossBundle& bundle, const GradientGate& gate);

}  // namespace apm
