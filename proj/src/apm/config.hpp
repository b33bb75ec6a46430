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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "apm/data.hpp"
#include "apm/model.hpp"
#include "apm/trainer.hpp"
#include "apm/vae.hpp"

namespace apm {

struct EvalOptions {
  int bins = 10;
  std::optional<double> delta;  // overrides the checkpoint's mixture weight
};

enum class SweepMode : std::uint8_t { kRetrain = 0, kInferenceOnly };

struct SweepOptions {
  std::vector<double> deltas = {0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0};
  std::vector<int> z2_dims = {4, 16};
  std::vector<std::uint64_t> seeds = {0};
  bool ablation = true;
  SweepMode mode = SweepMode::kRetrain;
  int threads = 0;  // 0: one per hardware thread
};

// Everything a command needs. `corpus` empty means: generate from `data`.
struct RunConfig {
  Method method = Method::kCausalApm;
  std::string corpus;
  DatasetSpec data;
  ModelConfig model;
  TrainConfig train;
  VaeConfig vae;
  EvalOptions eval;
  SweepOptions sweep;

  // Applies one `key = value` assignment; unknown keys and bad values throw kConfig.
  void Set(const std::string& key, const std::string& value);
  std::string Get(const std::string& key) const;
  static const std::vector<std::string>& Keys();

  // Every key in schema order, one `key = value` line each.
  std::string Echo() const;
  std::uint64_t Hash() const;
  void Validate() const;

  ModelConfig ResolvedModel() const;
};

// '#' starts a comment; blank lines are skipped; duplicate keys are rejected.
RunConfig ParseRunConfig(const std::string& text, const std::string& origin = "<string>");
RunConfig LoadRunConfig(const std::filesystem::path& path);

std::vector<double> ParseDoubleList(const std::string& text);

}  // namespace apm
