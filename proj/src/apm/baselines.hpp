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

#include "apm/trainer.hpp"

namespace apm {

// Same encoder and data order as CausalAPM; cross-entropy on a single head over R.
TrainResult TrainErm(const Corpus& corpus, ModelConfig model, const TrainConfig& config);

// Gaussian latent with reparameterized sampling, head on z, β-weighted KL.
TrainResult TrainBetaVae(const Corpus& corpus, ModelConfig model, const TrainConfig& config,
                         const VaeConfig& vae);

}  // namespace apm
