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

#include "apm/config.hpp"
#include "support.hpp"

using namespace apm;

TEST_CASE("parsing assignments, comments and overrides") {
  const RunConfig rc = ParseRunConfig(
      "# run\n"
      "method = erm\n"
      "\n"
      "data.bias_strength = 0.8   # strong\n"
      "train.epochs=2\n"
      "sweep.deltas = 0, 0.1,1\n"
      "sweep.mode = inference_only\n"
      "eval.delta = 0.25\n");
  CHECK(rc.method == Method::kErm);
  CHECK(rc.data.bias_strength == 0.8);
  CHECK(rc.train.epochs == 2);
  CHECK(rc.sweep.deltas == std::vector<double>{0.0, 0.1, 1.0});
  CHECK(rc.sweep.mode == SweepMode::kInferenceOnly);
  CHECK(rc.eval.delta == 0.25);
  CHECK(rc.Get("train.epochs") == "2");
  CHECK(rc.Get("sweep.deltas") == "0,0.1,1");
  CHECK(RunConfig{}.Get("eval.delta").empty());
}

TEST_CASE("bad configs name the offending line") {
  auto kind_and_message = [](const std::string& text) -> std::pair<ErrorKind, std::string> {
    try {
      ParseRunConfig(text, "x.conf");
    } catch (const Error& e) {
      return {e.kind(), e.what()};
    }
    return {ErrorKind::kState, ""};
  };
  auto [k1, m1] = kind_and_message("train.lr = 0.1\nno.such.key = 3\n");
  CHECK(k1 == ErrorKind::kConfig);
  CHECK(m1.find("x.conf:2") != std::string::npos);
  CHECK(m1.find("no.such.key") != std::string::npos);
  auto [k2, m2] = kind_and_message("train.lr = 0.1\ntrain.lr = 0.2\n");
  CHECK(k2 == ErrorKind::kConfig);
  CHECK(m2.find("duplicate") != std::string::npos);
  CHECK(kind_and_message("train.epochs = two\n").first == ErrorKind::kConfig);
  CHECK(kind_and_message("train.epochs\n").first == ErrorKind::kConfig);
  CHECK(kind_and_message("method = bert\n").first == ErrorKind::kConfig);
  CHECK(kind_and_message("sweep.mode = sometimes\n").first == ErrorKind::kConfig);
  CHECK_THROWS_AS(LoadRunConfig("/nonexistent/apm.conf"), Error);
}

TEST_CASE("echo is complete, ordered and hash-stable") {
  RunConfig a;
  const std::string echo = a.Echo();
  std::size_t lines = 0;
  for (char c : echo) lines += c == '\n' ? 1 : 0;
  CHECK(lines == RunConfig::Keys().size());
  CHECK(echo.rfind("method = causal_apm\n", 0) == 0);
  // parsing the echo reproduces the config
  const RunConfig b = ParseRunConfig(echo);
  CHECK(b.Echo() == echo);
  CHECK(b.Hash() == a.Hash());
  a.Set("train.delta", "0.2");
  CHECK(a.Hash() != b.Hash());
  a.Set("train.delta", "0.15");
  CHECK(a.Hash() == b.Hash());
}

TEST_CASE("validation") {
  RunConfig rc;
  rc.Validate();
  rc.sweep.z2_dims = {64};
  CHECK_THROWS_AS(rc.Validate(), Error);
  rc = RunConfig{};
  rc.eval.bins = 1;
  CHECK_THROWS_AS(rc.Validate(), Error);
  rc = RunConfig{};
  rc.data.vocab_size = 10;
  CHECK_THROWS_AS(rc.Validate(), Error);
  rc.corpus = "somewhere";
  rc.data.vocab_size = 200;
  rc.Validate();
  CHECK(rc.ResolvedModel().vocab_size == 200);
}

TEST_CASE("shipped configs parse") {
  const std::string root = APM_SOURCE_DIR;
  for (const char* name : {"/configs/benchmark.conf", "/configs/tiny.conf"}) {
    const RunConfig rc = LoadRunConfig(root + name);
    rc.Validate();
  }
}
