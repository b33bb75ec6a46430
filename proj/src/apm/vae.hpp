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

#include "apm/autograd.hpp"
#include "apm/model.hpp"

namespace apm {

struct VaeConfig {
  double beta_vae = 4.0;
  double recon_weight = 1.0;
  // Forces σ = 0 (z = μ): the model degenerates to an autoencoder-classifier.
  bool deterministic = false;
};

// ½Σ(μ² + σ² − 1 − ln σ²) for a single diagonal Gaussian against N(0, I).
double KlToStandardNormal(std::span<const double> mu, std::span<const double> sigma);

struct VaeTerms {
  Var ce;
  Var recon;
  Var kl;
  Var total;  // ce + recon_weight·recon + beta_vae·kl
};

// `noise` is the standard-normal ε of the reparameterization z = μ + σ⊙ε.
VaeTerms VaeLoss(Model& model, const Batch& batch, const Tensor& noise, const VaeConfig& config);

}  // namespace apm
