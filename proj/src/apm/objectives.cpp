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

#include "apm/objectives.hpp"

#include <cmath>
#include <cstdio>

#include "apm/errors.hpp"

namespace apm {

const char* ComponentName(Component c) {
  switch (c) {
    case Component::kBase: return "l_base";
    case Component::kDip: return "l_dip";
    case Component::kPmAdversarial: return "l_pm(-1)";
    case Component::kPred: return "l_pred";
    case Component::kPmTrain: return "l_pm(+1)";
  }
  return "?";
}

bool LossBundle::AllFinite() const {
  return std::isfinite(l_base) && std::isfinite(l_dip) && std::isfinite(l_pm) &&
         std::isfinite(l_pred) && std::isfinite(total);
}

std::string LossBundle::Describe() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "step %lld: l_base=%g l_dip=%g l_pm=%g l_pred=%g total=%g lambda=%g",
                static_cast<long long>(step), l_base, l_dip, l_pm, l_pred, total, lambda);
  return buf;
}

GradientGate GradientGate::Default() {
  GradientGate g;
  g.Set(Component::kBase, {Group::kEmbedding, Group::kEncoder, Group::kDecoder, Group::kHead1});
  g.Set(Component::kDip, {Group::kEncoder, Group::kLip});
  g.Set(Component::kPmAdversarial, {Group::kEncoder});
  g.Set(Component::kPred, {Group::kEncoder, Group::kHead2, Group::kHead3});
  g.Set(Component::kPmTrain, {Group::kPm});
  return g;
}

void GradientGate::Set(Component c, std::initializer_list<std::string_view> group_names) {
  GroupSet groups;
  for (auto name : group_names) groups.Insert(GroupFromName(name));
  Set(c, groups);
}

bool GradientGate::SatisfiesContract() const {
  for (int i = 0; i < kNumComponents; ++i) {
    const auto c = static_cast<Component>(i);
    if (c != Component::kBase && Allowed(c).Contains(Group::kEmbedding)) return false;
    if (c != Component::kPmTrain && Allowed(c).Contains(Group::kPm)) return false;
  }
  return true;
}

Var LossBase(const Var& r, const Var& r_prime, const Var& pred1, std::span<const int> labels) {
  return Add(NllFromProbs(pred1, labels), Mse(r, r_prime));
}

Var LossDip(const Var& s_prime, std::span<const double> s) {
  Tensor target(s.size(), 1);
  for (std::size_t i = 0; i < s.size(); ++i) target[i] = s[i];
  return Mse(s_prime, Constant(std::move(target)));
}

Var LossPm(const Var& z2_pred, const Var& z2, int beta_sign, double beta_mag) {
  if (beta_sign != 1 && beta_sign != -1) Fail(ErrorKind::kInput, "beta_sign must be ±1");
  return Scale(Mse(z2_pred, z2), static_cast<double>(beta_sign) * beta_mag);
}

Var LossPred(const Var& pred2, const Var& pred3, std::span<const int> labels, double delta) {
  if (delta < 0.0) Fail(ErrorKind::kInput, "delta must be non-negative");
  Var mix = Scale(Add(pred2, Scale(pred3, delta)), 1.0 / (1.0 + delta));
  return NllFromProbs(mix, labels);
}

Tensor MixtureScores(const Tensor& pred2, const Tensor& pred3, double delta) {
  CheckShapes(pred2.SameShape(pred3), "mixture", pred2, pred3);
  Tensor out(pred2.rows(), pred2.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (pred2[i] + delta * pred3[i]) / (1.0 + delta);
  }
  return out;
}

LossBundle Combine(double l_base, double l_dip, double l_pm, double l_pred, double lambda) {
  LossBundle b;
  b.l_base = l_base;
  b.l_dip = l_dip;
  b.l_pm = l_pm;
  b.l_pred = l_pred;
  b.lambda = lambda;
  b.total = l_base + lambda * (l_pm + l_dip) + l_pred;
  return b;
}

void ApplyGates(const LossTerms& terms, const LossBundle& bundle, const GradientGate& gate) {
  if (terms.base) Backward(terms.base, gate.Allowed(Component::kBase), 1.0);
  if (bundle.lambda != 0.0) {
    if (terms.dip) Backward(terms.dip, gate.Allowed(Component::kDip), bundle.lambda);
    if (terms.pm) {
      const Component c =
          bundle.beta_sign < 0 ? Component::kPmAdversarial : Component::kPmTrain;
      Backward(terms.pm, gate.Allowed(c), bundle.lambda);
    }
  }
  if (terms.pred) Backward(terms.pred, gate.Allowed(Component::kPred), 1.0);
}

}  // namespace apm
