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

#include "doctest.h"

#include <cmath>

#include "apm/model.hpp"
#include "apm/objectives.hpp"
#include "support.hpp"

using namespace apm;
using apm::testing::RandomPairs;
using apm::testing::TinyModel;

namespace {

Var Probs(std::size_t rows, std::vector<double> values) {
  const std::size_t cols = values.size() / rows;
  return Constant(Tensor(rows, cols, std::move(values)));
}

// Per-group copy of every gradient.
std::vector<Tensor> Grads(const ParameterStore& ps) {
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < ps.size(); ++i) out.push_back(ps.at(i).grad);
  return out;
}

bool GroupGradsZero(const ParameterStore& ps, Group g) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps.at(i).group != g) continue;
    for (double x : ps.at(i).grad.data()) {
      if (x != 0.0) return false;
    }
  }
  return true;
}

LossTerms AllTerms(Model& m, const Batch& b, double delta) {
  ApmForward f = m.ForwardApm(b);
  return {LossBase(f.r, f.r_prime, f.pred1, b.labels), LossDip(f.s_prime, b.overlap),
          LossPm(m.PmPredict(f.z1), f.z2, -1, 0.6), LossPred(f.pred2, f.pred3, b.labels, delta)};
}

}  // namespace

TEST_CASE("base loss") {
  const std::vector<int> labels{1, 0};
  Var r = Constant(Tensor(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6}));
  CHECK(LossBase(r, r, Probs(2, {0, 1, 1, 0}), labels)->value.item() == 0.0);
  const double third = 1.0 / 3.0;
  CHECK(LossBase(r, r, Probs(2, {third, third, third, third, third, third}), labels)
            ->value.item() == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  Rng rng(3);
  Tensor rp(2, 3), p1(2, 3);
  for (double& x : rp.data()) x = rng.Normal();
  for (std::size_t i = 0; i < 2; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < 3; ++j) s += (p1(i, j) = rng.Uniform(0.1, 1.0));
    for (std::size_t j = 0; j < 3; ++j) p1(i, j) /= s;
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < 6; ++i) mse += (r->value[i] - rp[i]) * (r->value[i] - rp[i]);
  const double expected = -(std::log(p1(0, 1)) + std::log(p1(1, 0))) / 2.0 + mse / 6.0;
  CHECK(LossBase(r, Constant(rp), Constant(p1), labels)->value.item() ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("literal-information loss") {
  const std::vector<double> s{0.3};
  CHECK(LossDip(Constant(Tensor(1, 1, 0.3)), s)->value.item() == 0.0);
  CHECK(LossDip(Constant(Tensor(1, 1, 0.0)), std::vector<double>{1.0})->value.item() == 1.0);
  CHECK(LossDip(Constant(Tensor(1, 1, 0.25)), std::vector<double>{0.5})->value.item() == 0.0625);
}

TEST_CASE("predictor-module loss") {
  Var a = Constant(Tensor(2, 2, std::vector<double>{1, 2, 3, 4}));
  CHECK(LossPm(a, a, 1, 0.6)->value.item() == 0.0);
  CHECK(LossPm(a, a, -1, 0.6)->value.item() == 0.0);
  // mse 0.5
  Var b = Constant(Tensor(2, 2, std::vector<double>{0, 2, 3, 5}));
  CHECK(LossPm(a, b, 1, 0.6)->value.item() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(LossPm(a, b, -1, 0.6)->value.item() == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK_THROWS_AS(LossPm(a, b, 0, 0.6), Error);
}

TEST_CASE("mixture prediction loss") {
  const std::vector<int> label0{0};
  Var p2 = Probs(1, {0.7, 0.2, 0.1}), p3 = Probs(1, {0.1, 0.3, 0.6});
  CHECK(LossPred(p2, p3, label0, 0.0)->value.item() == doctest::Approx(-std::log(0.7)));
  for (double d : {0.0, 0.15, 1.0, 10.0}) {
    CHECK(LossPred(p2, p2, label0, d)->value.item() ==
          doctest::Approx(-std::log(0.7)).epsilon(1e-14));
  }
  CHECK(LossPred(Probs(1, {1, 0}), Probs(1, {0, 1}), label0, 1.0)->value.item() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // large δ approaches CE(pred3)
  CHECK(LossPred(p2, p3, label0, 1e9)->value.item() ==
        doctest::Approx(-std::log(0.1)).epsilon(1e-6));
  // continuity in δ
  const double a = LossPred(p2, p3, label0, 0.15)->value.item();
  const double b = LossPred(p2, p3, label0, 0.15 + 1e-9)->value.item();
  CHECK(std::abs(a - b) < 1e-8);
  CHECK_THROWS_AS(LossPred(p2, p3, label0, -0.1), Error);
}

TEST_CASE("mixture argmax matches the unnormalized sum") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    Tensor p2(4, 3), p3(4, 3);
    for (double& x : p2.data()) x = rng.Uniform();
    for (double& x : p3.data()) x = rng.Uniform();
    const double d = rng.Uniform(0.0, 5.0);
    Tensor raw(4, 3);
    for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = p2[k] + d * p3[k];
    REQUIRE(ArgmaxRows(MixtureScores(p2, p3, d)) == ArgmaxRows(raw));
  }
}

TEST_CASE("lambda schedule boundaries") {
  LambdaSchedule s;
  CHECK(s(0) == 0.0);
  CHECK(s(1999) == 0.0);
  CHECK(s(2000) == 0.6);
  CHECK(s(100000) == 0.6);
}

TEST_CASE("combine") {
  CHECK(Combine(1.0, 0.04, -0.3, 0.7, 0.6).total == doctest::Approx(1.544).epsilon(1e-15));
  CHECK(Combine(0, 0, 0, 0, 0.6).total == 0.0);
  const LossBundle b = Combine(1.25, 3.0, -2.0, 0.5, 0.0);
  CHECK(b.total == 1.25 + 0.5);
  const LossBundle c = Combine(0.3, 0.7, -0.1, 0.9, 0.6);
  CHECK(c.total == c.l_base + c.lambda * (c.l_pm + c.l_dip) + c.l_pred);
  CHECK(c.AllFinite());
  CHECK_FALSE(Combine(NAN, 0, 0, 0, 0).AllFinite());
}

TEST_CASE("default gate respects the contract") {
  GradientGate g = GradientGate::Default();
  CHECK(g.SatisfiesContract());
  CHECK(g.Allowed(Component::kBase).Contains(Group::kEmbedding));
  CHECK(g.Allowed(Component::kPmTrain) == GroupSet{Group::kPm});
  g.Set(Component::kPred, {"encoder", "embedding"});
  CHECK_FALSE(g.SatisfiesContract());
  GradientGate h = GradientGate::Default();
  h.Set(Component::kDip, {"pm"});
  CHECK_FALSE(h.SatisfiesContract());
  CHECK_THROWS_AS(h.Set(Component::kDip, {"encoder", "attention"}), Error);
}

TEST_CASE("gated components leave embedding and predictor gradients at zero") {
  Model m(TinyModel(Method::kCausalApm), 4);
  const Batch b = MakeBatch(RandomPairs(5, 6, 30));
  const GradientGate gate = GradientGate::Default();
  for (int which = 0; which < 3; ++which) {
    m.params().ZeroGrad();
    LossTerms t = AllTerms(m, b, 0.15);
    LossTerms only;
    if (which == 0) only.dip = t.dip;
    if (which == 1) only.pm = t.pm;
    if (which == 2) only.pred = t.pred;
    LossBundle bundle = Combine(0, 0, 0, 0, 0.6);
    ApplyGates(only, bundle, gate);
    CHECK(GroupGradsZero(m.params(), Group::kEmbedding));
    CHECK(GroupGradsZero(m.params(), Group::kPm));
  }
  m.params().ZeroGrad();
  LossTerms all = AllTerms(m, b, 0.15);
  all.base = nullptr;
  ApplyGates(all, Combine(0, 0, 0, 0, 0.6), gate);
  CHECK(GroupGradsZero(m.params(), Group::kEmbedding));
  CHECK(GroupGradsZero(m.params(), Group::kPm));
  CHECK_FALSE(GroupGradsZero(m.params(), Group::kEncoder));
}

TEST_CASE("gated backward is the sum of per-component backwards") {
  Model m(TinyModel(Method::kCausalApm), 6);
  const Batch b = MakeBatch(RandomPairs(7, 5, 30));
  const GradientGate gate = GradientGate::Default();
  const double lambda = 0.6;

  m.params().ZeroGrad();
  ApplyGates(AllTerms(m, b, 0.15), Combine(0, 0, 0, 0, lambda), gate);
  const auto together = Grads(m.params());

  std::vector<Tensor> sum;
  for (int which = 0; which < 4; ++which) {
    m.params().ZeroGrad();
    LossTerms t = AllTerms(m, b, 0.15);
    switch (which) {
      case 0: Backward(t.base, gate.Allowed(Component::kBase)); break;
      case 1: Backward(t.dip, gate.Allowed(Component::kDip), lambda); break;
      case 2: Backward(t.pm, gate.Allowed(Component::kPmAdversarial), lambda); break;
      case 3: Backward(t.pred, gate.Allowed(Component::kPred)); break;
    }
    const auto g = Grads(m.params());
    if (sum.empty()) {
      sum = g;
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) sum[i] += g[i];
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    for (std::size_t k = 0; k < sum[i].size(); ++k) {
      REQUIRE(together[i][k] == doctest::Approx(sum[i][k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero lambda skips the disentanglement terms") {
  Model m(TinyModel(Method::kCausalApm), 8);
  const Batch b = MakeBatch(RandomPairs(9, 4, 30));
  m.params().ZeroGrad();
  ApplyGates(AllTerms(m, b, 0.15), Combine(0, 0, 0, 0, 0.0), GradientGate::Default());
  CHECK(GroupGradsZero(m.params(), Group::kLip));
  CHECK(GroupGradsZero(m.params(), Group::kPm));
}
