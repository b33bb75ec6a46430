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

#include "doctest.h"

#include <cmath>
#include <fstream>
#include <set>

#include "apm/data.hpp"
#include "apm/errors.hpp"
#include "apm/rng.hpp"
#include "support.hpp"

using namespace apm;
using apm::testing::TempDir;

namespace {

double BruteSimilarity(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
  std::set<std::int32_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  int common = 0;
  for (auto t : sa) common += sb.count(t) ? 1 : 0;
  return static_cast<double>(common) / static_cast<double>(std::max(a.size(), b.size()));
}

double Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

DatasetSpec TrainOnly(double rho, std::uint64_t seed) {
  DatasetSpec s;
  s.bias_strength = rho;
  s.n_train = 10000;
  s.n_dev = s.n_id_test = s.n_ood_test = 0;
  s.seed = seed;
  return s;
}

void WriteLines(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("sequence similarity examples") {
  const std::vector<std::int32_t> abc{1, 2, 3}, abde{1, 2, 4, 5}, xyz{7, 8, 9};
  CHECK(SequenceSimilarity(abc, abc) == 1.0);
  CHECK(SequenceSimilarity(abc, xyz) == 0.0);
  CHECK(SequenceSimilarity(abc, abde) == 0.5);
  CHECK(SequenceSimilarity(abde, abc) == 0.5);
  // repeats count once in the numerator, fully in the length
  CHECK(SequenceSimilarity(std::vector<std::int32_t>{1, 1, 1, 1}, std::vector<std::int32_t>{1}) == 0.25);
  CHECK_THROWS_AS(SequenceSimilarity(std::vector<std::int32_t>{}, abc), Error);
  CHECK_THROWS_AS(SequenceSimilarity(abc, std::vector<std::int32_t>{}), Error);
}

TEST_CASE("sequence similarity matches the set oracle and is symmetric") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::int32_t> a(rng.UniformInt(1, 12)), b(rng.UniformInt(1, 12));
    for (auto& t : a) t = static_cast<std::int32_t>(rng.UniformInt(0, 15));
    for (auto& t : b) t = static_cast<std::int32_t>(rng.UniformInt(0, 15));
    REQUIRE(SequenceSimilarity(a, b) == BruteSimilarity(a, b));
    REQUIRE(SequenceSimilarity(a, b) == SequenceSimilarity(b, a));
  }
}

TEST_CASE("generation is deterministic and caches overlap") {
  DatasetSpec s = apm::testing::SmallSpec(9);
  const Corpus a = GenerateCorpus(s), b = GenerateCorpus(s);
  CHECK(a.ContentHash() == b.ContentHash());
  CHECK(a.splits == b.splits);
  s.seed = 10;
  CHECK(GenerateCorpus(s).ContentHash() != a.ContentHash());
  for (Split sp : kAllSplits) {
    CHECK(a.split(sp).size() == static_cast<std::size_t>(s.Count(sp)));
    for (const auto& ex : a.split(sp)) {
      REQUIRE(ex.split == sp);
      REQUIRE(ex.overlap == SequenceSimilarity(ex.tokens1, ex.tokens2));
      REQUIRE(ex.tokens1.size() >= static_cast<std::size_t>(s.len1_min));
      REQUIRE(ex.tokens1.size() <= static_cast<std::size_t>(s.len1_max));
    }
  }
}

TEST_CASE("no-bias setting leaves overlap and bias label uncorrelated") {
  const Corpus c = GenerateCorpus(TrainOnly(1.0 / 3.0, 2));
  std::vector<double> high, bias;
  for (const auto& ex : c.split(Split::kTrain)) {
    high.push_back(ex.overlap >= 0.5 ? 1.0 : 0.0);
    bias.push_back(ex.label == 0 ? 1.0 : 0.0);
  }
  CHECK(std::abs(Pearson(high, bias)) <= 0.02);
}

TEST_CASE("degenerate and partial bias strengths") {
  const Corpus full = GenerateCorpus(TrainOnly(1.0, 4));
  for (const auto& ex : full.split(Split::kTrain)) {
    if (ex.overlap >= 0.5) REQUIRE(ex.label == 0);
  }
  const Corpus c = GenerateCorpus(TrainOnly(0.9, 4));
  const auto rate = ConditionalLabelRate(c.split(Split::kTrain), 0.5, 0, true);
  REQUIRE(rate.has_value());
  CHECK(*rate >= 0.88);
  CHECK(*rate <= 0.92);
  const auto low = ConditionalLabelRate(c.split(Split::kTrain), 0.5, 0, false);
  CHECK(*low == doctest::Approx(1.0 / 3.0).epsilon(0.1));
}

TEST_CASE("ood split decouples overlap from the label") {
  DatasetSpec s;
  s.n_train = s.n_dev = s.n_id_test = 0;
  s.n_ood_test = 3000;
  s.seed = 8;
  const Corpus c = GenerateCorpus(s);
  const auto& ood = c.split(Split::kOodTest);
  std::size_t high_nonbias = 0;
  std::vector<std::size_t> per_label(3, 0);
  for (const auto& ex : ood) {
    if (ex.overlap >= 0.5 && ex.label != 0) ++high_nonbias;
    ++per_label[static_cast<std::size_t>(ex.label)];
  }
  CHECK(static_cast<double>(high_nonbias) >= 0.3 * static_cast<double>(ood.size()));
  CHECK(per_label[0] == 1000);
  const auto hi = ConditionalLabelRate(ood, 0.5, 0, true);
  const auto lo = ConditionalLabelRate(ood, 0.5, 0, false);
  CHECK(*hi == doctest::Approx(*lo).epsilon(0.01));
}

TEST_CASE("infeasible specs are rejected") {
  DatasetSpec s;
  s.vocab_size = 15;
  try {
    GenerateCorpus(s);
    FAIL("expected a generation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kGeneration);
  }
  DatasetSpec t;
  t.len1_min = t.len1_max = 1;
  t.len2_min = t.len2_max = 4;
  t.overlap_threshold = 0.5;
  try {
    GenerateCorpus(t);
    FAIL("expected a generation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kGeneration);
  }
  DatasetSpec u;
  u.bias_strength = 1.5;
  CHECK_THROWS_AS(u.Validate(), Error);
}

TEST_CASE("jsonl loading") {
  TempDir dir("jsonl");
  const auto one = dir / "one.jsonl";
  WriteLines(one, "{\"sentence1\":\"a b\",\"sentence2\":\"a b\",\"label\":0}\n");
  const Corpus c = LoadJsonl(one);
  REQUIRE(c.split(Split::kTrain).size() == 1);
  CHECK(c.split(Split::kTrain)[0].overlap == 1.0);

  const auto missing = dir / "missing.jsonl";
  WriteLines(missing,
             "{\"sentence1\":\"a\",\"sentence2\":\"b\",\"label\":1}\n"
             "{\"sentence1\":\"a\",\"sentence2\":\"b\"}\n");
  try {
    LoadJsonl(missing);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  const auto unknown = dir / "unknown.jsonl";
  WriteLines(unknown, "{\"sentence1\":\"a\",\"sentence2\":\"b\",\"label\":\"maybe\"}\n");
  try {
    LoadJsonl(unknown);
    FAIL("expected an unknown-label error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("entailment") != std::string::npos);
    CHECK(msg.find("contradiction") != std::string::npos);
  }
}

TEST_CASE("jsonl round trip") {
  TempDir dir("rt");
  const auto src = dir / "three.jsonl";
  WriteLines(src,
             "{\"sentence1\":\"The cat sat\",\"sentence2\":\"the cat ran\",\"label\":\"neutral\"}\n"
             "{\"sentence1\":\"a b c\",\"sentence2\":\"d e\",\"label\":2,\"split\":\"train\"}\n"
             "{\"sentence1\":\"x y\",\"sentence2\":\"y x\",\"label\":\"entailment\"}\n");
  const Corpus a = LoadJsonl(src);
  const auto dst = dir / "out.jsonl";
  WriteJsonl(dst, a.split(Split::kTrain), a.vocab);
  const Corpus b = LoadJsonl(dst);
  CHECK(a.split(Split::kTrain) == b.split(Split::kTrain));
  CHECK(a.vocab.Hash() == b.vocab.Hash());
  CHECK(a.split(Split::kTrain)[0].label == 1);
}

TEST_CASE("corpus directory round trip keeps the vocabulary") {
  TempDir dir("corpus");
  const Corpus a = GenerateCorpus(apm::testing::SmallSpec(1));
  WriteCorpus(dir.path(), a);
  const Corpus b = LoadCorpus(dir.path());
  CHECK(a.ContentHash() == b.ContentHash());
  CHECK(a.splits == b.splits);
  Vocabulary other = Vocabulary::Synthetic(10);
  LoadOptions opts;
  opts.vocab = &other;
  CHECK_THROWS_AS(LoadCorpus(dir.path(), opts), Error);
  CHECK_THROWS_AS(LoadCorpus(dir / "nope"), Error);
}

TEST_CASE("overlap histogram") {
  std::vector<PairExample> ex(5);
  for (auto& e : ex) e.overlap = 1.0, e.label = 1;
  auto h = ComputeOverlapHistogram(ex, 3, 10);
  CHECK(h.edges.size() == 11);
  CHECK(h.counts[9] == 5);
  CHECK(h.label_freq[9][1] == 1.0);

  const Corpus c = GenerateCorpus(apm::testing::SmallSpec(2));
  const auto& train = c.split(Split::kTrain);
  h = ComputeOverlapHistogram(train, 3, 10);
  std::size_t total = 0;
  for (std::size_t b = 0; b < 10; ++b) {
    total += h.counts[b];
    if (h.counts[b] == 0) continue;
    double s = 0;
    for (double f : h.label_freq[b]) s += f;
    CHECK(s == doctest::Approx(1.0));
  }
  CHECK(total == train.size());
  CHECK(OverlapBin(0.0, 10) == 0);
  CHECK(OverlapBin(0.5, 10) == 5);
  CHECK(OverlapBin(1.0, 10) == 9);
}

TEST_CASE("top overlap bin carries the bias label under full bias") {
  DatasetSpec s = TrainOnly(1.0, 6);
  s.n_train = 3000;
  const Corpus c = GenerateCorpus(s);
  const auto h = ComputeOverlapHistogram(c.split(Split::kTrain), 3, 10);
  std::size_t top = 9;
  while (h.counts[top] == 0) --top;
  CHECK(h.label_freq[top][0] == 1.0);
}
