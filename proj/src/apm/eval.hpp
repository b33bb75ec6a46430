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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apm/data.hpp"
#include "apm/model.hpp"
#include "apm/tensor.hpp"

namespace apm {

// Predicted labels: argmax of Model::PredictScores over batches.
std::vector<int> Predict(Model& model, std::span<const PairExample> examples, double delta);

// Fraction of examples whose prediction matches the gold label.
double Accuracy(Model& model, std::span<const PairExample> examples, double delta);
double AccuracyOf(std::span<const PairExample> examples, std::span<const int> predicted);

// Label frequencies per equal-width overlap bin.
struct TendencyCurve {
  std::vector<std::string> label_names;
  std::vector<double> edges;                     // bins+1
  std::vector<std::size_t> counts;               // per bin
  std::vector<std::vector<double>> predicted;    // bins × labels; empty when gold-only
  std::vector<std::vector<double>> gold;         // bins × labels

  std::size_t bins() const { return counts.size(); }
  bool has_predictions() const { return !predicted.empty(); }
  // bin_low,bin_high,count[,pred_<label>...],gold_<label>...
  std::string ToCsv() const;
  static TendencyCurve FromCsv(const std::string& text);
  bool operator==(const TendencyCurve&) const = default;
};

// Empty bins are kept with count 0 and all-zero frequencies.
TendencyCurve TendencyFromPredictions(std::span<const PairExample> examples,
                                      std::span<const int> predicted,
                                      const std::vector<std::string>& label_names,
                                      std::size_t bins);
TendencyCurve GoldTendency(std::span<const PairExample> examples,
                           const std::vector<std::string>& label_names, std::size_t bins);
TendencyCurve ComputeTendencyCurve(Model& model, std::span<const PairExample> examples,
                                   const std::vector<std::string>& label_names, std::size_t bins,
                                   double delta);

// Frequency of `label` among predictions in the top minus the bottom
// non-empty bin.
double TopMinusBottomSpread(const TendencyCurve& curve, int label, bool use_predicted = true);

// Linear-predictability proxy for dependence between two codes: ridge
// regression z1 → z2 fit on the first half of the rows, R² = 1 − SSE/SST on
// the second half, averaged over z2 columns. nullopt when some held-out z2
// column is constant. Needs at least 10 rows per z1 column.
std::optional<double> MiProxy(const Tensor& z1, const Tensor& z2, double ridge = 1e-3);

}  // namespace apm
