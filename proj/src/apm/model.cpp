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

#include "apm/model.hpp"

#include <cmath>

#include "apm/errors.hpp"
#include "apm/rng.hpp"

namespace apm {
namespace {

constexpr std::array<const char*, 3> kMethodNames = {"causal_apm", "erm", "beta_vae"};

const char* HeadName(Head h) {
  switch (h) {
    case Head::kOnReconstruction: return "head1";
    case Head::kOnSemantic: return "head2";
    case Head::kOnLiteral: return "head3";
  }
  return "head?";
}

void CheckWidth(const Var& x, int width, const char* what) {
  if (x->value.cols() != static_cast<std::size_t>(width)) {
    Fail(ErrorKind::kDimension, std::string(what) + ": expected width " + std::to_string(width) +
                                    ", got " + x->value.ShapeString());
  }
}

}  // namespace

const char* MethodName(Method m) { return kMethodNames[static_cast<int>(m)]; }

Method MethodFromName(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (name == kMethodNames[i]) return static_cast<Method>(i);
  }
  Fail(ErrorKind::kConfig,
       "unknown method '" + std::string(name) + "' (allowed: causal_apm, erm, beta_vae)");
}

void ModelConfig::Validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) Fail(ErrorKind::kConfig, std::string("model config: ") + msg);
  };
  need(vocab_size >= 2, "vocab_size must be at least 2");
  need(num_labels >= 2, "num_labels must be at least 2");
  need(emb_dim > 0 && z_dim > 0 && lip_hidden > 0 && pm_hidden > 0, "widths must be positive");
  need(z2_dim > 0 && z2_dim < z_dim, "z2_dim must satisfy 0 < z2_dim < z_dim");
}

Batch MakeBatch(std::span<const PairExample> examples) {
  Batch b;
  for (const auto& ex : examples) {
    b.left.Append(ex.tokens1);
    b.right.Append(ex.tokens2);
    b.labels.push_back(ex.label);
    b.overlap.push_back(ex.overlap);
  }
  return b;
}

Batch MakeBatch(std::span<const PairExample> examples, std::span<const std::size_t> indices) {
  Batch b;
  for (std::size_t i : indices) {
    const auto& ex = examples[i];
    b.left.Append(ex.tokens1);
    b.right.Append(ex.tokens2);
    b.labels.push_back(ex.label);
    b.overlap.push_back(ex.overlap);
  }
  return b;
}

Model::Model(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng = Rng::Substream(seed, "init");
  const auto V = static_cast<std::size_t>(config_.vocab_size);
  const auto E = static_cast<std::size_t>(config_.emb_dim);
  const auto D = static_cast<std::size_t>(config_.repr_dim());
  const auto Z = static_cast<std::size_t>(config_.z_dim);
  const auto Z1 = static_cast<std::size_t>(config_.z1_dim());
  const auto Z2 = static_cast<std::size_t>(config_.z2_dim);
  const auto C = static_cast<std::size_t>(config_.num_labels);

  auto layer = [&](const std::string& name, Group g, std::size_t in, std::size_t out) {
    params_.AddWeight(name + ".weight", g, in, out, rng);
    params_.AddBias(name + ".bias", g, out);
  };

  params_.AddWeight("embedding", Group::kEmbedding, V, E, rng);
  switch (config_.method) {
    case Method::kCausalApm:
      layer("encoder", Group::kEncoder, D, Z);
      layer("decoder", Group::kDecoder, Z, D);
      layer("head1", Group::kHead1, D, C);
      layer("head2", Group::kHead2, Z1, C);
      layer("head3", Group::kHead3, Z2, C);
      layer("lip.hidden", Group::kLip, Z2, static_cast<std::size_t>(config_.lip_hidden));
      layer("lip.out", Group::kLip, static_cast<std::size_t>(config_.lip_hidden), 1);
      layer("pm.hidden", Group::kPm, Z1, static_cast<std::size_t>(config_.pm_hidden));
      layer("pm.out", Group::kPm, static_cast<std::size_t>(config_.pm_hidden), Z2);
      break;
    case Method::kErm:
      layer("head1", Group::kHead1, D, C);
      break;
    case Method::kBetaVae:
      layer("encoder.mu", Group::kEncoder, D, Z);
      layer("encoder.logvar", Group::kEncoder, D, Z);
      layer("decoder", Group::kDecoder, Z, D);
      layer("head2", Group::kHead2, Z, C);
      break;
  }
}

Var Model::EncodePair(const Batch& batch) {
  Var table = P("embedding");
  Var u = EmbedMean(table, batch.left);
  Var v = EmbedMean(table, batch.right);
  return ConcatCols({u, v, Abs(Sub(u, v)), Mul(u, v)});
}

void Model::Autoencode(const Var& r, Var& z, Var& z1, Var& z2, Var& r_prime) {
  CheckWidth(r, config_.repr_dim(), "autoencode input");
  if (config_.z1_dim() + config_.z2_dim != config_.z_dim) {
    Fail(ErrorKind::kDimension, "latent split does not cover z_dim");
  }
  z = Affine(r, P("encoder.weight"), P("encoder.bias"));
  z1 = SliceCols(z, 0, static_cast<std::size_t>(config_.z1_dim()));
  z2 = SliceCols(z, static_cast<std::size_t>(config_.z1_dim()),
                 static_cast<std::size_t>(config_.z_dim));
  r_prime = Affine(z, P("decoder.weight"), P("decoder.bias"));
}

Var Model::Logits(const Var& h, Head head) {
  const std::string name = HeadName(head);
  const Parameter& w = params_.Get(name + ".weight");
  if (h->value.cols() != w.value.rows()) {
    Fail(ErrorKind::kDimension, name + ": input width " + std::to_string(h->value.cols()) +
                                    " does not match head width " +
                                    std::to_string(w.value.rows()));
  }
  return Affine(h, P(name + ".weight"), P(name + ".bias"));
}

Var Model::Classify(const Var& h, Head head) { return Softmax(Logits(h, head)); }

Var Model::LipPredict(const Var& z2) {
  CheckWidth(z2, config_.z2_dim, "lip input");
  Var hidden = Tanh(Affine(z2, P("lip.hidden.weight"), P("lip.hidden.bias")));
  return Sigmoid(Affine(hidden, P("lip.out.weight"), P("lip.out.bias")));
}

Var Model::PmPredict(const Var& z1) {
  CheckWidth(z1, config_.z1_dim(), "pm input");
  Var hidden = Tanh(Affine(z1, P("pm.hidden.weight"), P("pm.hidden.bias")));
  return Affine(hidden, P("pm.out.weight"), P("pm.out.bias"));
}

ApmForward Model::ForwardApm(const Batch& batch) {
  if (config_.method != Method::kCausalApm) {
    Fail(ErrorKind::kState, "ForwardApm on a " + std::string(MethodName(config_.method)) +
                                " model");
  }
  ApmForward f;
  f.r = EncodePair(batch);
  Autoencode(f.r, f.z, f.z1, f.z2, f.r_prime);
  f.pred1 = Classify(f.r_prime, Head::kOnReconstruction);
  f.pred2 = Classify(f.z1, Head::kOnSemantic);
  f.pred3 = Classify(f.z2, Head::kOnLiteral);
  f.s_prime = LipPredict(f.z2);
  return f;
}

Var Model::ForwardErmLogits(const Batch& batch) {
  if (config_.method != Method::kErm) Fail(ErrorKind::kState, "ForwardErmLogits on non-ERM model");
  return Logits(EncodePair(batch), Head::kOnReconstruction);
}

VaeForward Model::ForwardVae(const Batch& batch, const Tensor& noise, bool deterministic) {
  if (config_.method != Method::kBetaVae) Fail(ErrorKind::kState, "ForwardVae on non-VAE model");
  VaeForward f;
  f.r = EncodePair(batch);
  f.mu = Affine(f.r, P("encoder.mu.weight"), P("encoder.mu.bias"));
  f.logvar = Affine(f.r, P("encoder.logvar.weight"), P("encoder.logvar.bias"));
  if (deterministic) {
    f.z = f.mu;
  } else {
    CheckShapes(noise.SameShape(f.mu->value), "reparameterize", noise, f.mu->value);
    Var sigma = Exp(Scale(f.logvar, 0.5));
    f.z = Add(f.mu, Mul(sigma, Constant(noise)));
  }
  f.r_prime = Affine(f.z, P("decoder.weight"), P("decoder.bias"));
  f.logits = Logits(f.z, Head::kOnSemantic);
  return f;
}

Tensor Model::PredictScores(const Batch& batch, double delta) {
  switch (config_.method) {
    case Method::kCausalApm: {
      ApmForward f = ForwardApm(batch);
      Tensor out = f.pred2->value;
      const Tensor& p3 = f.pred3->value;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] + delta * p3[i]) / (1.0 + delta);
      return out;
    }
    case Method::kErm:
      return Softmax(ForwardErmLogits(batch))->value;
    case Method::kBetaVae: {
      VaeForward f = ForwardVae(batch, Tensor(), true);
      return Softmax(f.logits)->value;
    }
  }
  return {};
}

std::pair<Tensor, Tensor> Model::Latents(const Batch& batch) {
  const auto z1 = static_cast<std::size_t>(config_.z1_dim());
  const auto z = static_cast<std::size_t>(config_.z_dim);
  Var code;
  if (config_.method == Method::kCausalApm) {
    code = Affine(EncodePair(batch), P("encoder.weight"), P("encoder.bias"));
  } else if (config_.method == Method::kBetaVae) {
    code = ForwardVae(batch, Tensor(), true).mu;
  } else {
    Fail(ErrorKind::kState, "ERM models have no latent code");
  }
  return {SliceCols(code, 0, z1)->value, SliceCols(code, z1, z)->value};
}

std::vector<int> ArgmaxRows(const Tensor& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace apm
