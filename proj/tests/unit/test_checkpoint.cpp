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

#include <fstream>

#include "apm/checkpoint.hpp"
#include "apm/eval.hpp"
#include "support.hpp"

using namespace apm;
using apm::testing::TempDir;

namespace {

TrainResult Trained() {
  const Corpus c = GenerateCorpus(apm::testing::SmallSpec(2));
  TrainConfig tc;
  tc.epochs = 1;
  tc.eval_every = 5;
  tc.warmup_steps = 3;
  ModelConfig mc;
  mc.emb_dim = 8;
  mc.z_dim = 12;
  return Train(c, mc, tc);
}

}  // namespace

TEST_CASE("checkpoints round-trip byte-for-byte") {
  TrainResult r = Trained();
  Checkpoint& c = r.checkpoints.front();
  c.config_hash = 0x1234abcdULL;
  const std::string bytes = SerializeCheckpoint(c);
  CHECK(bytes.rfind(std::string("APMCKPT\0", 8), 0) == 0);
  Checkpoint back = DeserializeCheckpoint(bytes);
  CHECK(SerializeCheckpoint(back) == bytes);
  CHECK(back.step == c.step);
  CHECK(back.dev_acc == c.dev_acc);
  CHECK(back.delta == c.delta);
  CHECK(back.config_hash == c.config_hash);
  CHECK(back.vocab == c.vocab);
  CHECK(back.label_names == c.label_names);
  CHECK(back.model.config() == c.model.config());
  CHECK(back.main_optimizer.step == c.main_optimizer.step);
  CHECK(back.pm_optimizer.m == c.pm_optimizer.m);

  // identical forward outputs on a probe batch
  const Batch probe = MakeBatch(apm::testing::RandomPairs(3, 16, 60));
  CHECK(back.model.PredictScores(probe, 0.15) == c.model.PredictScores(probe, 0.15));
  CHECK(back.model.Latents(probe) == c.model.Latents(probe));
}

TEST_CASE("checkpoint files and corruption") {
  TrainResult r = Trained();
  TempDir dir("ckpt");
  const auto path = dir / "a.bin";
  SaveCheckpoint(path, r.checkpoints.front());
  const std::string bytes = apm::testing::ReadFile(path);
  CHECK(bytes == SerializeCheckpoint(r.checkpoints.front()));
  CHECK(SerializeCheckpoint(LoadCheckpoint(path)) == bytes);

  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x40;
  CHECK_THROWS_AS(DeserializeCheckpoint(flipped), Error);
  CHECK_THROWS_AS(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 3)), Error);
  CHECK_THROWS_AS(DeserializeCheckpoint("not a checkpoint"), Error);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(DeserializeCheckpoint(bad_magic), Error);
  try {
    LoadCheckpoint(dir / "missing.bin");
    FAIL("expected an i/o error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}

TEST_CASE("baseline checkpoints round-trip") {
  const Corpus c = GenerateCorpus(apm::testing::SmallSpec(2));
  TrainConfig tc;
  tc.epochs = 0;
  for (Method m : {Method::kErm, Method::kBetaVae}) {
    ModelConfig mc;
    mc.method = m;
    mc.emb_dim = 4;
    mc.z_dim = 8;
    mc.z2_dim = 2;
    TrainResult r = Train(c, mc, tc);
    const std::string bytes = SerializeCheckpoint(r.checkpoints.front());
    Checkpoint back = DeserializeCheckpoint(bytes);
    CHECK(back.model.config().method == m);
    CHECK(back.model.params().Snapshot() == r.checkpoints.front().model.params().Snapshot());
    CHECK(std::isnan(back.dev_acc) == std::isnan(r.checkpoints.front().dev_acc));
  }
}
