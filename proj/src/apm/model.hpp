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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apm/autograd.hpp"
#include "apm/data.hpp"
#include "apm/parameter.hpp"

namespace apm {

enum class Method : std::uint8_t { kCausalApm = 0, kErm, kBetaVae };

const char* MethodName(Method m);
Method MethodFromName(std::string_view name);

struct ModelConfig {
  Method method = Method::kCausalApm;
  int vocab_size = 200;
  int num_labels = 3;
  int emb_dim = 32;
  int z_dim = 64;
  int z2_dim = 4;
  int lip_hidden = 16;
  int pm_hidden = 16;

  int repr_dim() const { return 4 * emb_dim; }
  int z1_dim() const { return z_dim - z2_dim; }
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// A batch of pairs flattened for the pooled encoder.
struct Batch {
  TokenBatch left;
  TokenBatch right;
  std::vector<int> labels;
  std::vector<double> overlap;

  std::size_t rows() const { return labels.size(); }
};

Batch MakeBatch(std::span<const PairExample> examples);
Batch MakeBatch(std::span<const PairExample> examples, std::span<const std::size_t> indices);

enum class Head : std::uint8_t { kOnReconstruction = 1, kOnSemantic = 2, kOnLiteral = 3 };

// Outputs of one CausalAPM forward pass, all recorded for backward.
struct ApmForward {
  Var r;        // pair representation, width repr_dim
  Var z;        // latent code, width z_dim
  Var z1;       // semantic part
  Var z2;       // literal part
  Var r_prime;  // reconstruction
  Var pred1;    // head on r_prime
  Var pred2;    // head on z1
  Var pred3;    // head on z2
  Var s_prime;  // literal-information prediction, n×1
};

struct VaeForward {
  Var r;
  Var mu;
  Var logvar;
  Var z;
  Var r_prime;
  Var logits;
};

class Model {
 public:
  Model() = default;
  // Registers and initializes the parameters `config.method` needs.
  Model(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  // R = concat(u, v, |u−v|, u⊙v) where u, v are mean-pooled embeddings.
  Var EncodePair(const Batch& batch);
  // Z = affine(R) split into (z1, z2); R′ = affine(Z).
  void Autoencode(const Var& r, Var& z, Var& z1, Var& z2, Var& r_prime);
  // Softmax probabilities from a single-layer head.
  Var Classify(const Var& h, Head head);
  Var Logits(const Var& h, Head head);
  // tanh hidden layer then logistic output in (0, 1).
  Var LipPredict(const Var& z2);
  // tanh hidden layer then affine output of width z2_dim.
  Var PmPredict(const Var& z1);

  ApmForward ForwardApm(const Batch& batch);
  Var ForwardErmLogits(const Batch& batch);
  // `noise` must be rows×z_dim; pass zeros for the posterior mean.
  VaeForward ForwardVae(const Batch& batch, const Tensor& noise, bool deterministic = false);

  // Final class scores: the δ-mixture (pred2 + δ·pred3)/(1+δ) for CausalAPM,
  // softmax probabilities for the baselines (δ ignored).
  Tensor PredictScores(const Batch& batch, double delta);
  // (z1, z2) rows for CausalAPM; (μ[:z1], μ[z1:]) for the VAE.
  std::pair<Tensor, Tensor> Latents(const Batch& batch);

 private:
  Var P(std::string_view name) { return Leaf(params_.Get(name)); }

  ModelConfig config_;
  ParameterStore params_;
};

// Row-wise argmax; ties resolve to the lowest index.
std::vector<int> ArgmaxRows(const Tensor& scores);

}  // namespace apm
