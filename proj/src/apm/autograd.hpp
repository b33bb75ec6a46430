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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "apm/parameter.hpp"
#include "apm/tensor.hpp"

namespace apm {

// A recorded value in a reverse-mode graph. Graphs are built per forward
// pass and released when the last Var referencing them goes away.
struct Node {
  Tensor value;
  Tensor grad;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;  // accumulates this->grad into parents
  Parameter* param = nullptr;
  bool requires_grad = false;
};

using Var = std::shared_ptr<Node>;

// Token id sequences for one side of a batch, flattened.
struct TokenBatch {
  std::vector<std::int32_t> ids;
  std::vector<std::size_t> offsets;  // size rows+1

  std::size_t rows() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  void Append(std::span<const std::int32_t> seq);
};

Var Leaf(Parameter& p);
Var Constant(Tensor value);
Var Detach(const Var& x);

Var Affine(const Var& x, const Var& w, const Var& b);
Var MatMulOp(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& x, double c);
Var Abs(const Var& x);
Var Tanh(const Var& x);
Var Sigmoid(const Var& x);
Var Exp(const Var& x);
Var ConcatCols(const std::vector<Var>& parts);
Var SliceCols(const Var& x, std::size_t begin, std::size_t end);

// Row-wise mean of embedding rows; out-of-range ids are an input error.
Var EmbedMean(const Var& table, const TokenBatch& tokens);

Var Softmax(const Var& logits);
// Mean over rows of −log softmax(logits)[label].
Var SoftmaxCrossEntropy(const Var& logits, std::span<const int> labels);
// Mean over rows of −log probs[label].
Var NllFromProbs(const Var& probs, std::span<const int> labels);
// Mean of squared elementwise differences.
Var Mse(const Var& a, const Var& b);
// Batch mean of ½Σ(μ² + exp(logvar) − 1 − logvar).
Var KlStandardNormal(const Var& mu, const Var& logvar);

// Accumulates d(seed·root)/dθ into Parameter::grad for every trainable leaf
// whose group is in `allowed`. Intermediate gradients flow regardless of the
// mask; only the final write into parameters is gated.
void Backward(const Var& root, GroupSet allowed = GroupSet::All(), double seed = 1.0);

}  // namespace apm
