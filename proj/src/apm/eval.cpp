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

#include "apm/eval.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "apm/errors.hpp"
#include "apm/format.hpp"
#include "apm/linalg.hpp"

namespace apm {
namespace {

constexpr std::size_t kEvalBatch = 500;

std::vector<double> Normalized(std::vector<double> counts, std::size_t total) {
  if (total == 0) return counts;
  for (double& c : counts) c /= static_cast<double>(total);
  return counts;
}

}  // namespace

std::vector<int> Predict(Model& model, std::span<const PairExample> examples, double delta) {
  std::vector<int> out;
  out.reserve(examples.size());
  for (std::size_t lo = 0; lo < examples.size(); lo += kEvalBatch) {
    const std::size_t hi = std::min(examples.size(), lo + kEvalBatch);
    Batch b = MakeBatch(examples.subspan(lo, hi - lo));
    auto pred = ArgmaxRows(model.PredictScores(b, delta));
    out.insert(out.end(), pred.begin(), pred.end());
  }
  return out;
}

double AccuracyOf(std::span<const PairExample> examples, std::span<const int> predicted) {
  if (examples.empty()) Fail(ErrorKind::kInput, "accuracy of an empty split");
  if (predicted.size() != examples.size()) {
    Fail(ErrorKind::kDimension, "prediction count does not match split size");
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) hit += predicted[i] == examples[i].label;
  return static_cast<double>(hit) / static_cast<double>(examples.size());
}

double Accuracy(Model& model, std::span<const PairExample> examples, double delta) {
  if (examples.empty()) Fail(ErrorKind::kInput, "accuracy of an empty split");
  return AccuracyOf(examples, Predict(model, examples, delta));
}

TendencyCurve TendencyFromPredictions(std::span<const PairExample> examples,
                                      std::span<const int> predicted,
                                      const std::vector<std::string>& label_names,
                                      std::size_t bins) {
  if (bins < 2) Fail(ErrorKind::kInput, "tendency curve needs at least 2 bins");
  const bool with_pred = !predicted.empty();
  if (with_pred && predicted.size() != examples.size()) {
    Fail(ErrorKind::kDimension, "prediction count does not match split size");
  }
  const std::size_t labels = label_names.size();
  TendencyCurve c;
  c.label_names = label_names;
  for (std::size_t i = 0; i <= bins; ++i) {
    c.edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  }
  c.counts.assign(bins, 0);
  std::vector<std::vector<double>> pred(bins, std::vector<double>(labels, 0.0));
  std::vector<std::vector<double>> gold(bins, std::vector<double>(labels, 0.0));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const std::size_t b = OverlapBin(examples[i].overlap, bins);
    ++c.counts[b];
    gold[b][static_cast<std::size_t>(examples[i].label)] += 1.0;
    if (with_pred) pred[b][static_cast<std::size_t>(predicted[i])] += 1.0;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    c.gold.push_back(Normalized(gold[b], c.counts[b]));
    if (with_pred) c.predicted.push_back(Normalized(pred[b], c.counts[b]));
  }
  return c;
}

TendencyCurve GoldTendency(std::span<const PairExample> examples,
                           const std::vector<std::string>& label_names, std::size_t bins) {
  return TendencyFromPredictions(examples, {}, label_names, bins);
}

TendencyCurve ComputeTendencyCurve(Model& model, std::span<const PairExample> examples,
                                   const std::vector<std::string>& label_names, std::size_t bins,
                                   double delta) {
  const auto pred = Predict(model, examples, delta);
  return TendencyFromPredictions(examples, pred, label_names, bins);
}

double TopMinusBottomSpread(const TendencyCurve& curve, int label, bool use_predicted) {
  const auto& freq = use_predicted ? curve.predicted : curve.gold;
  if (freq.empty()) Fail(ErrorKind::kState, "tendency curve has no predictions");
  std::optional<std::size_t> lo, hi;
  for (std::size_t b = 0; b < curve.bins(); ++b) {
    if (curve.counts[b] == 0) continue;
    if (!lo) lo = b;
    hi = b;
  }
  if (!lo) Fail(ErrorKind::kState, "tendency curve has no examples");
  const auto l = static_cast<std::size_t>(label);
  return freq[*hi][l] - freq[*lo][l];
}

std::string TendencyCurve::ToCsv() const {
  std::ostringstream os;
  os << "bin_low,bin_high,count";
  if (has_predictions()) {
    for (const auto& n : label_names) os << ",pred_" << n;
  }
  for (const auto& n : label_names) os << ",gold_" << n;
  os << '\n';
  for (std::size_t b = 0; b < bins(); ++b) {
    os << FormatDouble(edges[b]) << ',' << FormatDouble(edges[b + 1]) << ',' << counts[b];
    if (has_predictions()) {
      for (double f : predicted[b]) os << ',' << FormatDouble(f);
    }
    for (double f : gold[b]) os << ',' << FormatDouble(f);
    os << '\n';
  }
  return os.str();
}

TendencyCurve TendencyCurve::FromCsv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) Fail(ErrorKind::kInput, "curves: missing header");
  const auto header = SplitString(Trim(line), ',');
  if (header.size() < 4 || header[0] != "bin_low" || header[1] != "bin_high" ||
      header[2] != "count") {
    Fail(ErrorKind::kInput, "curves: unexpected header '" + line + "'");
  }
  TendencyCurve c;
  std::vector<std::string> pred_names;
  for (std::size_t i = 3; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h.rfind("pred_", 0) == 0) {
      pred_names.push_back(h.substr(5));
    } else if (h.rfind("gold_", 0) == 0) {
      c.label_names.push_back(h.substr(5));
    } else {
      Fail(ErrorKind::kInput, "curves: unexpected column '" + h + "'");
    }
  }
  const bool with_pred = !pred_names.empty();
  if (with_pred && pred_names != c.label_names) {
    Fail(ErrorKind::kInput, "curves: predicted and gold label columns differ");
  }
  const std::size_t labels = c.label_names.size();
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    const auto cells = SplitString(Trim(line), ',');
    if (cells.size() != header.size()) {
      Fail(ErrorKind::kInput, "curves line " + std::to_string(lineno) + ": wrong column count");
    }
    if (c.edges.empty()) c.edges.push_back(ParseDouble(cells[0]));
    c.edges.push_back(ParseDouble(cells[1]));
    c.counts.push_back(static_cast<std::size_t>(std::stoull(cells[2])));
    std::size_t k = 3;
    if (with_pred) {
      std::vector<double> row;
      for (std::size_t j = 0; j < labels; ++j) row.push_back(ParseDouble(cells[k++]));
      c.predicted.push_back(std::move(row));
    }
    std::vector<double> row;
    for (std::size_t j = 0; j < labels; ++j) row.push_back(ParseDouble(cells[k++]));
    c.gold.push_back(std::move(row));
  }
  return c;
}

std::optional<double> MiProxy(const Tensor& z1, const Tensor& z2, double ridge) {
  CheckShapes(z1.rows() == z2.rows(), "mi_proxy", z1, z2);
  const std::size_t n = z1.rows();
  const std::size_t p = z1.cols();
  const std::size_t q = z2.cols();
  if (n < 10 * p) {
    Fail(ErrorKind::kInput, "mi_proxy needs at least 10 rows per z1 column (" +
                                std::to_string(n) + " rows for width " + std::to_string(p) + ")");
  }
  const std::size_t fit = n / 2;

  std::vector<double> mx(p, 0.0), my(q, 0.0);
  for (std::size_t i = 0; i < fit; ++i) {
    for (std::size_t j = 0; j < p; ++j) mx[j] += z1(i, j);
    for (std::size_t j = 0; j < q; ++j) my[j] += z2(i, j);
  }
  for (double& v : mx) v /= static_cast<double>(fit);
  for (double& v : my) v /= static_cast<double>(fit);

  Tensor xtx(p, p), xty(p, q);
  for (std::size_t i = 0; i < fit; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      const double xa = z1(i, a) - mx[a];
      for (std::size_t b = 0; b < p; ++b) xtx(a, b) += xa * (z1(i, b) - mx[b]);
      for (std::size_t b = 0; b < q; ++b) xty(a, b) += xa * (z2(i, b) - my[b]);
    }
  }
  for (std::size_t a = 0; a < p; ++a) xtx(a, a) += ridge;
  const Tensor w = CholeskySolve(xtx, xty);

  const std::size_t held = n - fit;
  std::vector<double> mean_held(q, 0.0);
  for (std::size_t i = fit; i < n; ++i) {
    for (std::size_t b = 0; b < q; ++b) mean_held[b] += z2(i, b);
  }
  for (double& v : mean_held) v /= static_cast<double>(held);

  std::vector<double> sse(q, 0.0), sst(q, 0.0);
  for (std::size_t i = fit; i < n; ++i) {
    for (std::size_t b = 0; b < q; ++b) {
      double pred = my[b];
      for (std::size_t a = 0; a < p; ++a) pred += (z1(i, a) - mx[a]) * w(a, b);
      const double r = z2(i, b) - pred;
      const double d = z2(i, b) - mean_held[b];
      sse[b] += r * r;
      sst[b] += d * d;
    }
  }
  double r2 = 0.0;
  for (std::size_t b = 0; b < q; ++b) {
    if (!(sst[b] > 0.0)) return std::nullopt;
    r2 += 1.0 - sse[b] / sst[b];
  }
  return r2 / static_cast<double>(q);
}

}  // namespace apm
