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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace apm {

enum class Split : std::uint8_t { kTrain = 0, kDev, kIdTest, kOodTest };
inline constexpr std::array<Split, 4> kAllSplits = {Split::kTrain, Split::kDev, Split::kIdTest,
                                                    Split::kOodTest};

const char* SplitName(Split s);
Split SplitFromName(std::string_view name);

// Token ↔ id bijection. Id 0 is reserved for padding/unknown tokens.
class Vocabulary {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  Vocabulary();
  // "<unk>", "w1", ..., "w{size-1}"; the vocabulary of generated corpora.
  static Vocabulary Synthetic(std::size_t size);
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  std::int32_t Add(std::string_view token);
  std::int32_t Id(std::string_view token) const;  // 0 when absent
  const std::string& Token(std::int32_t id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::uint64_t Hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

struct PairExample {
  std::vector<std::int32_t> tokens1;
  std::vector<std::int32_t> tokens2;
  int label = 0;
  Split split = Split::kTrain;
  double overlap = 0.0;  // cached sequence_similarity(tokens1, tokens2)

  bool operator==(const PairExample&) const = default;
};

struct Corpus {
  Vocabulary vocab;
  int num_labels = 0;
  std::vector<std::string> label_names;
  std::array<std::vector<PairExample>, 4> splits;

  std::vector<PairExample>& split(Split s) { return splits[static_cast<int>(s)]; }
  const std::vector<PairExample>& split(Split s) const { return splits[static_cast<int>(s)]; }
  std::size_t TotalSize() const;
  // Hash over the serialized examples and vocabulary.
  std::uint64_t ContentHash() const;
};

// Parameters of the synthetic bias generator. Pairs whose overlap is at least
// `overlap_threshold` carry `bias_label` with probability `bias_strength` in the
// in-distribution splits; the OOD split draws labels independently of overlap.
// Each label also owns a set of hidden pattern tokens; one is inserted into both
// sentences and matches the gold label with probability `semantic_reliability`.
struct DatasetSpec {
  int vocab_size = 200;
  int num_labels = 3;
  int len1_min = 6;
  int len1_max = 12;
  int len2_min = 4;
  int len2_max = 10;
  int bias_label = 0;
  double bias_strength = 0.95;
  double overlap_threshold = 0.5;
  double high_overlap_rate = 0.3;
  double ood_high_overlap_rate = 0.5;
  double semantic_reliability = 0.9;
  int pattern_tokens_per_label = 2;
  int n_train = 10000;
  int n_dev = 2000;
  int n_id_test = 2000;
  int n_ood_test = 2000;
  std::uint64_t seed = 0;

  // Throws kConfig for out-of-range fields and kGeneration for infeasible ones.
  void Validate() const;
  int Count(Split s) const;
};

// |set(x1) ∩ set(x2)| / max(len(x1), len(x2)).
double SequenceSimilarity(std::span<const std::int32_t> x1, std::span<const std::int32_t> x2);

Corpus GenerateCorpus(const DatasetSpec& spec);

// Lowercase + whitespace split.
std::vector<std::string> Tokenize(std::string_view text);

struct LoadOptions {
  const Vocabulary* vocab = nullptr;  // built from the train split when null
  std::vector<std::string> label_names = {"entailment", "neutral", "contradiction"};
  Split default_split = Split::kTrain;
};

// One JSONL file, records split by their optional "split" field.
Corpus LoadJsonl(const std::filesystem::path& path, const LoadOptions& options = {});
// A corpus directory (train/dev/id_test/ood_test .jsonl plus optional
// metadata.json) or a single JSONL file.
Corpus LoadCorpus(const std::filesystem::path& path, const LoadOptions& options = {});

std::string SerializeExample(const PairExample& ex, const Vocabulary& vocab);
void WriteJsonl(const std::filesystem::path& path, std::span<const PairExample> examples,
                const Vocabulary& vocab);

// Writes <dir>/{train,dev,id_test,ood_test}.jsonl and metadata.json. The
// metadata echoes `spec` when given and records the vocabulary, label names,
// measured bias rate and content hash.
void WriteCorpus(const std::filesystem::path& dir, const Corpus& corpus,
                 const DatasetSpec* spec = nullptr);

struct OverlapHistogram {
  std::vector<double> edges;          // bins+1 entries over [0, 1]
  std::vector<std::size_t> counts;    // per bin
  std::vector<std::vector<double>> label_freq;  // per bin × label; zeros for empty bins
};

std::size_t OverlapBin(double overlap, std::size_t bins);
OverlapHistogram ComputeOverlapHistogram(std::span<const PairExample> examples, int num_labels,
                                         std::size_t bins);

// Fraction of examples with overlap ≥ threshold that carry `label`; nullopt if none.
std::optional<double> ConditionalLabelRate(std::span<const PairExample> examples,
                                           double threshold, int label, bool above);

}  // namespace apm
