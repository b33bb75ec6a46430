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

#include "apm/vae.hpp"

#include <cmath>

#include "apm/errors.hpp"

namespace apm {

double KlToStandardNormal(std::span<const double> mu, std::span<const double> sigma) {
  if (mu.size() != sigma.size()) Fail(ErrorKind::kDimension, "kl: μ and σ widths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double s2 = sigma[i] * sigma[i];
    acc += mu[i] * mu[i] + s2 - 1.0 - std::log(s2);
  }
  return 0.5 * acc;
}

VaeTerms VaeLoss(Model& model, const Batch& batch, const Tensor& noise, const VaeConfig& config) {
  if (config.beta_vae < 0.0) Fail(ErrorKind::kConfig, "beta_vae must be non-negative");
  VaeForward f = model.ForwardVae(batch, noise, config.deterministic);
  VaeTerms t;
  t.ce = SoftmaxCrossEntropy(f.logits, batch.labels);
  t.recon = Mse(f.r, f.r_prime);
  t.total = Add(t.ce, Scale(t.recon, config.recon_weight));
  if (!config.deterministic) {
    t.kl = KlStandardNormal(f.mu, f.logvar);
    t.total = Add(t.total, Scale(t.kl, config.beta_vae));
  }
  return t;
}

}  // namespace apm
