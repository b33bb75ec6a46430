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

#include "apm/baselines.hpp"
#include "apm/config.hpp"
#include "apm/eval.hpp"
#include "apm/vae.hpp"
#include "support.hpp"

using namespace apm;
using apm::testing::CheckGradients;
using apm::testing::RandomPairs;
using apm::testing::TinyModel;

namespace {

Tensor Noise(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  Rng rng(seed);
  Tensor t(rows, cols);
  for (double& x : t.data()) x = rng.Normal();
  return t;
}

double Gap(TrainResult& r, const Corpus& c) {
  Model& m = r.checkpoints.front().model;
  return Accuracy(m, c.split(Split::kIdTest), 0.0) - Accuracy(m, c.split(Split::kOodTest), 0.0);
}

}  // namespace

TEST_CASE("closed-form KL to the standard normal") {
  const std::vector<double> zero{0.0, 0.0, 0.0}, one{1.0, 1.0, 1.0};
  CHECK(KlToStandardNormal(zero, one) == 0.0);
  CHECK(std::abs(KlToStandardNormal(std::vector<double>{1.0}, std::vector<double>{1.0}) - 0.5) <=
        1e-12);
  CHECK(KlToStandardNormal(one, one) == 1.5);
  // σ = 2: ½(4 − 1 − ln 4)
  CHECK(KlToStandardNormal(std::vector<double>{0.0}, std::vector<double>{2.0}) ==
        doctest::Approx(0.5 * (3.0 - std::log(4.0))).epsilon(1e-15));
  CHECK_THROWS_AS(KlToStandardNormal(zero, std::vector<double>{1.0}), Error);

  // recorded op agrees with the scalar formula
  Var kl = KlStandardNormal(Constant(Tensor(1, 2, std::vector<double>{1.0, 0.0})),
                            Constant(Tensor(1, 2, std::vector<double>{0.0, std::log(4.0)})));
  CHECK(kl->value.item() ==
        doctest::Approx(KlToStandardNormal(std::vector<double>{1.0, 0.0},
                                           std::vector<double>{1.0, 2.0}))
            .epsilon(1e-14));
}

TEST_CASE("vae loss gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Model m(TinyModel(Method::kBetaVae), seed);
    const Batch b = MakeBatch(RandomPairs(seed + 100, 4, 30));
    const Tensor eps = Noise(seed, 4, static_cast<std::size_t>(m.config().z_dim));
    VaeConfig cfg;
    cfg.beta_vae = 0.5 + static_cast<double>(seed);
    auto res = CheckGradients(m.params(), [&] { return VaeLoss(m, b, eps, cfg).total; });
    INFO("worst entry " << res.worst);
    CHECK(res.max_rel_err <= 1e-4);
  }
}

TEST_CASE("deterministic zero-beta vae is an autoencoder-classifier") {
  Model m(TinyModel(Method::kBetaVae), 7);
  const Batch b = MakeBatch(RandomPairs(8, 6, 30));
  VaeConfig cfg;
  cfg.beta_vae = 0.0;
  cfg.deterministic = true;
  const Tensor eps = Noise(9, 6, 8), other = Noise(10, 6, 8);
  VaeTerms t = VaeLoss(m, b, eps, cfg);
  CHECK(t.total->value.item() == VaeLoss(m, b, other, cfg).total->value.item());

  Var r = m.EncodePair(b);
  auto& ps = m.params();
  Var z = Affine(r, Leaf(ps.Get("encoder.mu.weight")), Leaf(ps.Get("encoder.mu.bias")));
  Var rp = Affine(z, Leaf(ps.Get("decoder.weight")), Leaf(ps.Get("decoder.bias")));
  Var logits = Affine(z, Leaf(ps.Get("head2.weight")), Leaf(ps.Get("head2.bias")));
  const double expected =
      SoftmaxCrossEntropy(logits, b.labels)->value.item() + Mse(r, rp)->value.item();
  CHECK(t.total->value.item() == doctest::Approx(expected).epsilon(1e-14));

  ps.ZeroGrad();
  Backward(t.total);
  for (double g : ps.Get("encoder.logvar.weight").grad.data()) REQUIRE(g == 0.0);

  CHECK_THROWS_AS(TrainBetaVae(Corpus{}, TinyModel(Method::kBetaVae), TrainConfig{},
                               VaeConfig{-1.0, 1.0, false}),
                  Error);
}

TEST_CASE("vae training runs and is deterministic") {
  const Corpus c = GenerateCorpus(apm::testing::SmallSpec(3));
  TrainConfig tc;
  tc.epochs = 1;
  tc.eval_every = 5;
  auto a = TrainBetaVae(c, ModelConfig{}, tc, VaeConfig{});
  auto b = TrainBetaVae(c, ModelConfig{}, tc, VaeConfig{});
  CHECK(a.history.ToCsv() == b.history.ToCsv());
  CHECK(a.checkpoints.front().model.config().method == Method::kBetaVae);
  auto [z1, z2] = a.checkpoints.front().model.Latents(MakeBatch(c.split(Split::kDev)));
  CHECK(z1.cols() == 60);
  CHECK(z2.cols() == 4);
}

TEST_CASE("erm without bias generalizes across splits") {
  DatasetSpec spec;
  spec.bias_strength = 1.0 / 3.0;
  spec.seed = 17;
  const Corpus c = GenerateCorpus(spec);
  auto r = TrainErm(c, ModelConfig{}, TrainConfig{});
  const double gap = Gap(r, c);
  MESSAGE("no-bias id-ood gap " << gap);
  CHECK(std::abs(gap) <= 0.03);
}

TEST_CASE("erm on the benchmark corpus leans on overlap") {
  const RunConfig rc = LoadRunConfig(std::string(APM_SOURCE_DIR) + "/configs/benchmark.conf");
  const Corpus c = GenerateCorpus(rc.data);
  auto r = TrainErm(c, rc.ResolvedModel(), rc.train);
  const double gap = Gap(r, c);
  MESSAGE("biased id-ood gap " << gap);
  CHECK(gap >= 0.15);
}
