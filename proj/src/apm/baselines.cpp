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

#include "apm/baselines.hpp"

namespace apm {

TrainResult TrainErm(const Corpus& corpus, ModelConfig model, const TrainConfig& config) {
  model.method = Method::kErm;
  return Train(corpus, model, config);
}

TrainResult TrainBetaVae(const Corpus& corpus, ModelConfig model, const TrainConfig& config,
                         const VaeConfig& vae) {
  if (!(vae.beta_vae >= 0.0)) Fail(ErrorKind::kConfig, "beta_vae must be non-negative");
  model.method = Method::kBetaVae;
  return Train(corpus, model, config, vae);
}

}  // namespace apm
