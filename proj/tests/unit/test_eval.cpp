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

#include "apm/eval.hpp"
#include "apm/sweep.hpp"
#include "apm/trainer.hpp"
#include "support.hpp"

using namespace apm;
using apm::testing::RandomPairs;
using apm::testing::SmallSpec;
using apm::testing::TinyModel;

namespace {

// head2 and head3 ignore their input and always favor `label`.
Model ConstantModel(int label, int num_labels) {
  ModelConfig mc = TinyModel(Method::kCausalApm, 60);
  mc.num_labels = num_labels;
  Model m(mc, 1);
  for (const char* head : {"head2", "head3"}) {
    m.params().Get(std::string(head) + ".weight").value.Fill(0.0);
    Tensor& b = m.params().Get(std::string(head) + ".bias").value;
    b.Fill(0.0);
    b(0, static_cast<std::size_t>(label)) = 1.0;
  }
  return m;
}

RunConfig SweepConfig() {
  RunConfig rc;
  rc.data = SmallSpec(4);
  rc.train.epochs = 1;
  rc.train.eval_every = 10;
  rc.train.warmup_steps = 5;
  return rc;
}

}  // namespace

TEST_CASE("accuracy of trivial predictors") {
  auto ex = RandomPairs(1, 40, 30, 2);
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i].label = static_cast<int>(i % 2);
  Model m = ConstantModel(1, 2);
  CHECK(Accuracy(m, ex, 0.15) == 0.5);
  CHECK(Predict(m, ex, 0.15) == std::vector<int>(40, 1));

  std::vector<int> gold;
  for (const auto& e : ex) gold.push_back(e.label);
  CHECK(AccuracyOf(ex, gold) == 1.0);
  CHECK_THROWS_AS(AccuracyOf(ex, std::vector<int>(3, 0)), Error);

  // gold one-hots as head2 output win the mixture for any δ < 1
  Rng rng(2);
  Tensor onehot(ex.size(), 2), p3(ex.size(), 2);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    onehot(i, static_cast<std::size_t>(gold[i])) = 1.0;
    p3(i, 0) = rng.Uniform();
    p3(i, 1) = 1.0 - p3(i, 0);
  }
  CHECK(AccuracyOf(ex, ArgmaxRows(MixtureScores(onehot, p3, 0.15))) == 1.0);
}

TEST_CASE("zero delta uses head2 alone") {
  Model m(TinyModel(Method::kCausalApm), 3);
  const auto ex = RandomPairs(4, 50, 30);
  const Batch b = MakeBatch(ex);
  const auto head2 = ArgmaxRows(m.ForwardApm(b).pred2->value);
  CHECK(Predict(m, ex, 0.0) == head2);
  CHECK(Accuracy(m, ex, 0.0) == AccuracyOf(ex, head2));
}

TEST_CASE("tendency curves") {
  const Corpus c = GenerateCorpus(SmallSpec(5));
  const auto& ood = c.split(Split::kOodTest);
  Model m = ConstantModel(2, 3);
  const TendencyCurve curve = ComputeTendencyCurve(m, ood, c.label_names, 10, 0.15);
  REQUIRE(curve.bins() == 10);
  REQUIRE(curve.has_predictions());
  std::size_t total = 0;
  for (std::size_t b = 0; b < 10; ++b) {
    total += curve.counts[b];
    if (curve.counts[b] == 0) {
      CHECK(curve.predicted[b] == std::vector<double>(3, 0.0));
      continue;
    }
    CHECK(curve.predicted[b][2] == 1.0);
    double s = 0;
    for (double f : curve.gold[b]) s += f;
    CHECK(s == doctest::Approx(1.0));
  }
  CHECK(total == ood.size());
  CHECK(TopMinusBottomSpread(curve, 2) == 0.0);

  const TendencyCurve parsed = TendencyCurve::FromCsv(curve.ToCsv());
  CHECK(parsed == curve);
  const TendencyCurve gold = GoldTendency(ood, c.label_names, 5);
  CHECK_FALSE(gold.has_predictions());
  CHECK(TendencyCurve::FromCsv(gold.ToCsv()) == gold);
  CHECK(gold.ToCsv().rfind("bin_low,bin_high,count,gold_entailment", 0) == 0);
  CHECK_THROWS_AS(TendencyCurve::FromCsv("bin_low,bin_high\n0,1\n"), Error);
}

TEST_CASE("top-minus-bottom spread") {
  std::vector<PairExample> ex(4);
  ex[0].overlap = 0.05, ex[1].overlap = 0.07, ex[2].overlap = 0.95, ex[3].overlap = 0.55;
  const std::vector<int> pred{1, 0, 0, 1};
  const std::vector<std::string> names{"a", "b"};
  const TendencyCurve curve = TendencyFromPredictions(ex, pred, names, 10);
  // top bin: label 0 at 1.0; bottom bin: 0.5
  CHECK(TopMinusBottomSpread(curve, 0) == 0.5);
  CHECK(TopMinusBottomSpread(curve, 1) == -0.5);
}

TEST_CASE("dependence proxy examples") {
  Rng rng(7);
  const std::size_t n = 5000;
  Tensor z1(n, 6), z2(n, 2), indep(n, 2), noisy(n, 2);
  for (double& x : z1.data()) x = rng.Normal();
  for (std::size_t i = 0; i < n; ++i) {
    z2(i, 0) = 2.0 * z1(i, 0) - z1(i, 3) + 0.5;
    z2(i, 1) = -z1(i, 5);
    indep(i, 0) = rng.Normal();
    indep(i, 1) = rng.Normal();
    noisy(i, 0) = z1(i, 0) + rng.Normal();
    noisy(i, 1) = z1(i, 1) + rng.Normal();
  }
  CHECK(*MiProxy(z1, z2) >= 0.99);
  CHECK(std::abs(*MiProxy(z1, indep)) <= 0.02);
  CHECK(*MiProxy(z1, noisy) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(*MiProxy(z1, noisy) - 0.5) <= 0.05);

  Tensor flat(n, 2, 3.0);
  CHECK_FALSE(MiProxy(z1, flat).has_value());
  CHECK_THROWS_AS(MiProxy(Tensor(20, 6), Tensor(20, 2)), Error);
  CHECK_THROWS_AS(MiProxy(Tensor(100, 6), Tensor(90, 2)), Error);
}

TEST_CASE("sweep shape and cell seeds") {
  const Corpus c = GenerateCorpus(SmallSpec(4));
  RunConfig rc = SweepConfig();
  rc.sweep.deltas = {0.0, 0.15, 1.0};
  rc.sweep.z2_dims = {2, 4};
  const SweepResult r = RunSweep(c, rc);
  REQUIRE(r.cells.size() == 3 * 2 + 2);
  CHECK(r.cells[0].delta == 0.0);
  CHECK(r.cells[2].z2_dim == 2);
  CHECK(r.cells[3].z2_dim == 4);
  for (std::size_t i = 0; i < 6; ++i) CHECK_FALSE(r.cells[i].ablation);
  for (std::size_t i = 6; i < 8; ++i) {
    CHECK(r.cells[i].ablation);
    CHECK(r.cells[i].lambda == 0.0);
    CHECK(r.cells[i].delta == rc.train.delta);
  }
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    CHECK(r.cells[i].seed == SweepCellSeed(0, i));
    CHECK(r.cells[i].id_acc >= 0.0);
    CHECK(r.cells[i].ood_acc <= 1.0);
  }
  const std::string csv = r.ToCsv();
  CHECK(csv.rfind("delta,z2_dim,lambda,id_acc,ood_acc,seed\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  rc.sweep.threads = 1;
  CHECK(RunSweep(c, rc).ToCsv() == csv);
}

TEST_CASE("a single sweep cell equals a direct training run") {
  const Corpus c = GenerateCorpus(SmallSpec(4));
  RunConfig rc = SweepConfig();
  rc.sweep.deltas = {0.0};
  rc.sweep.z2_dims = {4};
  rc.sweep.ablation = false;
  const SweepResult r = RunSweep(c, rc);
  REQUIRE(r.cells.size() == 1);

  ModelConfig mc = rc.ResolvedModel();
  mc.z2_dim = 4;
  TrainConfig tc = rc.train;
  tc.seed = r.cells[0].seed;
  tc.delta = 0.0;
  auto direct = Train(c, mc, tc);
  Model& m = direct.checkpoints.front().model;
  CHECK(r.cells[0].id_acc == Accuracy(m, c.split(Split::kIdTest), 0.0));
  CHECK(r.cells[0].ood_acc == Accuracy(m, c.split(Split::kOodTest), 0.0));
}

TEST_CASE("inference-only sweeps share one model per width") {
  const Corpus c = GenerateCorpus(SmallSpec(4));
  RunConfig rc = SweepConfig();
  rc.sweep.deltas = {0.0, 0.5};
  rc.sweep.z2_dims = {4};
  rc.sweep.ablation = false;
  rc.sweep.mode = SweepMode::kInferenceOnly;
  const SweepResult r = RunSweep(c, rc);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].seed == r.cells[1].seed);
  CHECK(r.mode == SweepMode::kInferenceOnly);
}
