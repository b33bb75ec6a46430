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
#include <string>
#include <vector>

#include "apm/config.hpp"
#include "apm/data.hpp"

namespace apm {

struct SweepCell {
  double delta = 0.0;
  int z2_dim = 0;
  double lambda = 0.0;
  double id_acc = 0.0;
  double ood_acc = 0.0;
  std::uint64_t seed = 0;     // training seed of the cell
  std::uint64_t replicate = 0;  // base seed the cell belongs to
  bool ablation = false;
};

struct SweepResult {
  SweepMode mode = SweepMode::kRetrain;
  std::vector<SweepCell> cells;

  // delta,z2_dim,lambda,id_acc,ood_acc,seed
  std::string ToCsv() const;
};

// Training seed of cell `index` within the sweep of `base_seed`.
std::uint64_t SweepCellSeed(std::uint64_t base_seed, std::size_t index);

// One cell per (base seed, z2_dim, δ), then one λ=0 ablation cell per
// (base seed, z2_dim) at the configured training δ. Cells run on a thread pool
// and land in that order regardless of completion order.
SweepResult RunSweep(const Corpus& corpus, const RunConfig& config);

}  // namespace apm
