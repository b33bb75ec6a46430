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

#include "apm/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "apm/errors.hpp"
#include "apm/hash.hpp"
#include "apm/rng.hpp"
#include "json.hpp"

namespace apm {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<const char*, 4> kSplitNames = {"train", "dev", "id_test", "ood_test"};

std::vector<std::string> DefaultLabelNames(int num_labels) {
  if (num_labels == 3) return {"entailment", "neutral", "contradiction"};
  std::vector<std::string> names;
  for (int i = 0; i < num_labels; ++i) names.push_back("label" + std::to_string(i));
  return names;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Number of shared token types m for a pair of lengths (n, k) is feasible for
// the requested overlap class when m/max(n,k) lands on the right side of θ.
std::vector<int> FeasibleShared(int n, int k, double theta, bool high) {
  std::vector<int> out;
  const int denom = std::max(n, k);
  for (int m = 1; m <= std::min(n, k); ++m) {
    const double s = static_cast<double>(m) / denom;
    if ((s >= theta) == high) out.push_back(m);
  }
  return out;
}

struct RawRecord {
  std::vector<std::string> tokens1;
  std::vector<std::string> tokens2;
  int label;
  Split split;
};

int ParseLabel(const json& value, const std::vector<std::string>& names, std::size_t line) {
  if (value.is_number_integer()) {
    const auto v = value.get<long long>();
    if (v < 0 || v >= static_cast<long long>(names.size())) {
      Fail(ErrorKind::kInput, "line " + std::to_string(line) + ": label " + std::to_string(v) +
                                  " outside [0, " + std::to_string(names.size()) + ")");
    }
    return static_cast<int>(v);
  }
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == s) return static_cast<int>(i);
    }
    std::string allowed;
    for (const auto& n : names) allowed += (allowed.empty() ? "" : ", ") + n;
    Fail(ErrorKind::kInput, "line " + std::to_string(line) + ": unknown label '" + s +
                                "' (allowed: " + allowed + ")");
  }
  Fail(ErrorKind::kInput, "line " + std::to_string(line) + ": label must be int or string");
}

std::vector<RawRecord> ParseJsonl(const std::filesystem::path& path,
                                  const std::vector<std::string>& label_names,
                                  Split default_split) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<RawRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      Fail(ErrorKind::kInput, where + ": malformed record: " + e.what());
    }
    if (!rec.is_object()) Fail(ErrorKind::kInput, where + ": record is not an object");
    for (const char* field : {"sentence1", "sentence2", "label"}) {
      if (!rec.contains(field)) {
        Fail(ErrorKind::kInput, where + ": missing field '" + field + "'");
      }
    }
    if (!rec["sentence1"].is_string() || !rec["sentence2"].is_string()) {
      Fail(ErrorKind::kInput, where + ": sentence fields must be strings");
    }
    RawRecord r;
    r.tokens1 = Tokenize(rec["sentence1"].get<std::string>());
    r.tokens2 = Tokenize(rec["sentence2"].get<std::string>());
    if (r.tokens1.empty() || r.tokens2.empty()) {
      Fail(ErrorKind::kInput, where + ": empty sentence");
    }
    try {
      r.label = ParseLabel(rec["label"], label_names, lineno);
    } catch (const Error& e) {
      Fail(ErrorKind::kInput, path.string() + ": " + e.what());
    }
    r.split = default_split;
    if (rec.contains("split")) {
      if (!rec["split"].is_string()) Fail(ErrorKind::kInput, where + ": split must be a string");
      try {
        r.split = SplitFromName(rec["split"].get<std::string>());
      } catch (const Error& e) {
        Fail(ErrorKind::kInput, where + ": " + e.what());
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

PairExample ToExample(const RawRecord& r, const Vocabulary& vocab) {
  PairExample ex;
  for (const auto& t : r.tokens1) ex.tokens1.push_back(vocab.Id(t));
  for (const auto& t : r.tokens2) ex.tokens2.push_back(vocab.Id(t));
  ex.label = r.label;
  ex.split = r.split;
  ex.overlap = SequenceSimilarity(ex.tokens1, ex.tokens2);
  return ex;
}

Vocabulary BuildVocabulary(const std::vector<RawRecord>& records) {
  Vocabulary vocab;
  for (const auto& r : records) {
    if (r.split != Split::kTrain) continue;
    for (const auto& t : r.tokens1) vocab.Add(t);
    for (const auto& t : r.tokens2) vocab.Add(t);
  }
  return vocab;
}

json SpecToJson(const DatasetSpec& s) {
  json j;
  j["vocab_size"] = s.vocab_size;
  j["num_labels"] = s.num_labels;
  j["len1_min"] = s.len1_min;
  j["len1_max"] = s.len1_max;
  j["len2_min"] = s.len2_min;
  j["len2_max"] = s.len2_max;
  j["bias_label"] = s.bias_label;
  j["bias_strength"] = s.bias_strength;
  j["overlap_threshold"] = s.overlap_threshold;
  j["high_overlap_rate"] = s.high_overlap_rate;
  j["ood_high_overlap_rate"] = s.ood_high_overlap_rate;
  j["semantic_reliability"] = s.semantic_reliability;
  j["pattern_tokens_per_label"] = s.pattern_tokens_per_label;
  j["n_train"] = s.n_train;
  j["n_dev"] = s.n_dev;
  j["n_id_test"] = s.n_id_test;
  j["n_ood_test"] = s.n_ood_test;
  j["seed"] = s.seed;
  return j;
}

// Builds one pair whose overlap lands on the requested side of θ. The pattern
// token is always the only guaranteed shared type.
PairExample MakePair(const DatasetSpec& spec, Rng& rng, bool high, int label, int cue_label) {
  const int content_lo = 1;
  const int content_hi = spec.vocab_size - spec.num_labels * spec.pattern_tokens_per_label - 1;
  int n = 0, k = 0;
  std::vector<int> options;
  for (int attempt = 0; attempt < 10000 && options.empty(); ++attempt) {
    n = static_cast<int>(rng.UniformInt(spec.len1_min, spec.len1_max));
    k = static_cast<int>(rng.UniformInt(spec.len2_min, spec.len2_max));
    options = FeasibleShared(n, k, spec.overlap_threshold, high);
  }
  if (options.empty()) {
    Fail(ErrorKind::kGeneration, "could not reach the requested overlap class");
  }
  const int shared = options[rng.UniformInt(0, static_cast<std::int64_t>(options.size()) - 1)];

  const int pattern = content_hi + 1 + cue_label * spec.pattern_tokens_per_label +
                      static_cast<int>(rng.UniformInt(0, spec.pattern_tokens_per_label - 1));

  // Distinct content tokens: n-1 for the first sentence, k-shared fresh ones for the second.
  const int fresh = k - shared;
  const int needed = (n - 1) + fresh;
  std::vector<std::int32_t> pool;
  pool.reserve(static_cast<std::size_t>(needed));
  std::vector<char> used(static_cast<std::size_t>(content_hi + 1), 0);
  while (static_cast<int>(pool.size()) < needed) {
    const auto t = static_cast<std::int32_t>(rng.UniformInt(content_lo, content_hi));
    if (used[t]) continue;
    used[t] = 1;
    pool.push_back(t);
  }

  PairExample ex;
  ex.tokens1.push_back(pattern);
  ex.tokens1.insert(ex.tokens1.end(), pool.begin(), pool.begin() + (n - 1));
  ex.tokens2.push_back(pattern);
  ex.tokens2.insert(ex.tokens2.end(), pool.begin(), pool.begin() + (shared - 1));
  ex.tokens2.insert(ex.tokens2.end(), pool.begin() + (n - 1), pool.end());
  rng.Shuffle(ex.tokens1);
  rng.Shuffle(ex.tokens2);
  ex.label = label;
  ex.overlap = SequenceSimilarity(ex.tokens1, ex.tokens2);
  return ex;
}

int OtherLabel(Rng& rng, int num_labels, int excluded) {
  int l = static_cast<int>(rng.UniformInt(0, num_labels - 2));
  return l >= excluded ? l + 1 : l;
}

}  // namespace

const char* SplitName(Split s) { return kSplitNames[static_cast<int>(s)]; }

Split SplitFromName(std::string_view name) {
  for (Split s : kAllSplits) {
    if (name == SplitName(s)) return s;
  }
  Fail(ErrorKind::kInput, "unknown split '" + std::string(name) +
                              "' (allowed: train, dev, id_test, ood_test)");
}

Vocabulary::Vocabulary() { Add(kUnknown); }

Vocabulary Vocabulary::Synthetic(std::size_t size) {
  Vocabulary v;
  for (std::size_t i = 1; i < size; ++i) v.Add("w" + std::to_string(i));
  return v;
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens[0] != kUnknown) {
    Fail(ErrorKind::kInput, "vocabulary must start with " + std::string(kUnknown));
  }
  Vocabulary v;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (v.index_.count(tokens[i]) != 0) {
      Fail(ErrorKind::kInput, "duplicate vocabulary token '" + tokens[i] + "'");
    }
    v.Add(tokens[i]);
  }
  return v;
}

std::int32_t Vocabulary::Add(std::string_view token) {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::int32_t Vocabulary::Id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? 0 : it->second;
}

const std::string& Vocabulary::Token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    Fail(ErrorKind::kInput, "token id " + std::to_string(id) + " outside vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::uint64_t Vocabulary::Hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : tokens_) {
    h = Fnv1a64(t, h);
    h = Fnv1a64(std::string_view("\n", 1), h);
  }
  return h;
}

std::size_t Corpus::TotalSize() const {
  std::size_t n = 0;
  for (const auto& s : splits) n += s.size();
  return n;
}

std::uint64_t Corpus::ContentHash() const {
  std::uint64_t h = vocab.Hash();
  for (const auto& s : splits) {
    for (const auto& ex : s) h = Fnv1a64(SerializeExample(ex, vocab), h);
  }
  return h;
}

void DatasetSpec::Validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) Fail(ErrorKind::kConfig, "dataset spec: " + msg);
  };
  need(num_labels >= 2, "num_labels must be at least 2");
  need(bias_label >= 0 && bias_label < num_labels, "bias_label outside [0, num_labels)");
  need(bias_strength >= 1.0 / num_labels - 1e-12 && bias_strength <= 1.0,
       "bias_strength must lie in [1/num_labels, 1]");
  need(overlap_threshold > 0.0 && overlap_threshold < 1.0,
       "overlap_threshold must lie strictly inside (0, 1)");
  need(high_overlap_rate >= 0.0 && high_overlap_rate <= 1.0, "high_overlap_rate outside [0, 1]");
  need(ood_high_overlap_rate >= 0.0 && ood_high_overlap_rate <= 1.0,
       "ood_high_overlap_rate outside [0, 1]");
  need(semantic_reliability >= 0.0 && semantic_reliability <= 1.0,
       "semantic_reliability outside [0, 1]");
  need(pattern_tokens_per_label >= 1, "pattern_tokens_per_label must be positive");
  need(len1_min >= 1 && len2_min >= 1, "sentence lengths must be at least 1");
  need(len1_min <= len1_max && len2_min <= len2_max, "length ranges must be ordered");
  need(n_train >= 0 && n_dev >= 0 && n_id_test >= 0 && n_ood_test >= 0,
       "split counts must be non-negative");

  const int content = vocab_size - 1 - num_labels * pattern_tokens_per_label;
  if (content < len1_max + len2_max) {
    Fail(ErrorKind::kGeneration,
         "vocab_size " + std::to_string(vocab_size) +
             " leaves too few content tokens for the requested sentence lengths");
  }
  bool high_ok = false, low_ok = false;
  for (int n = len1_min; n <= len1_max; ++n) {
    for (int k = len2_min; k <= len2_max; ++k) {
      high_ok = high_ok || !FeasibleShared(n, k, overlap_threshold, true).empty();
      low_ok = low_ok || !FeasibleShared(n, k, overlap_threshold, false).empty();
    }
  }
  const bool wants_high = high_overlap_rate > 0.0 || ood_high_overlap_rate > 0.0;
  const bool wants_low = high_overlap_rate < 1.0 || ood_high_overlap_rate < 1.0;
  if ((wants_high && !high_ok) || (wants_low && !low_ok)) {
    Fail(ErrorKind::kGeneration, "overlap_threshold " + std::to_string(overlap_threshold) +
                                     " is unreachable for the given length ranges");
  }
}

int DatasetSpec::Count(Split s) const {
  switch (s) {
    case Split::kTrain: return n_train;
    case Split::kDev: return n_dev;
    case Split::kIdTest: return n_id_test;
    case Split::kOodTest: return n_ood_test;
  }
  return 0;
}

double SequenceSimilarity(std::span<const std::int32_t> x1, std::span<const std::int32_t> x2) {
  if (x1.empty() || x2.empty()) {
    Fail(ErrorKind::kInput, "sequence_similarity: empty sequence");
  }
  std::vector<std::int32_t> a(x1.begin(), x1.end());
  std::vector<std::int32_t> b(x2.begin(), x2.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(std::max(x1.size(), x2.size()));
}

Corpus GenerateCorpus(const DatasetSpec& spec) {
  spec.Validate();
  Corpus corpus;
  corpus.vocab = Vocabulary::Synthetic(static_cast<std::size_t>(spec.vocab_size));
  corpus.num_labels = spec.num_labels;
  corpus.label_names = DefaultLabelNames(spec.num_labels);

  const int L = spec.num_labels;
  for (Split split : kAllSplits) {
    const int count = spec.Count(split);
    auto& out = corpus.split(split);
    out.reserve(static_cast<std::size_t>(count));

    // OOD design: labels cycle evenly and each label gets the same share of
    // high-overlap pairs, then the order is shuffled. Overlap and label are
    // independent by construction.
    std::vector<std::pair<bool, int>> ood_design;
    if (split == Split::kOodTest) {
      std::vector<int> seen(static_cast<std::size_t>(L), 0);
      for (int i = 0; i < count; ++i) {
        const int label = i % L;
        const int j = seen[label]++;
        const bool high = static_cast<long long>((j + 1) * spec.ood_high_overlap_rate) >
                          static_cast<long long>(j * spec.ood_high_overlap_rate);
        ood_design.emplace_back(high, label);
      }
      Rng order = Rng::Substream(spec.seed, "ood-design");
      order.Shuffle(ood_design);
    }

    for (int i = 0; i < count; ++i) {
      Rng rng = Rng::Substream(spec.seed, SplitName(split), static_cast<std::uint64_t>(i));
      bool high;
      int label;
      if (split == Split::kOodTest) {
        std::tie(high, label) = ood_design[static_cast<std::size_t>(i)];
      } else {
        high = rng.Bernoulli(spec.high_overlap_rate);
        if (high) {
          label = rng.Bernoulli(spec.bias_strength) ? spec.bias_label
                                                    : OtherLabel(rng, L, spec.bias_label);
        } else {
          label = static_cast<int>(rng.UniformInt(0, L - 1));
        }
      }
      const int cue =
          rng.Bernoulli(spec.semantic_reliability) ? label : OtherLabel(rng, L, label);
      PairExample ex = MakePair(spec, rng, high, label, cue);
      ex.split = split;
      out.push_back(std::move(ex));
    }
  }
  return corpus;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Corpus LoadJsonl(const std::filesystem::path& path, const LoadOptions& options) {
  if (options.label_names.size() < 2) Fail(ErrorKind::kConfig, "need at least 2 label names");
  auto records = ParseJsonl(path, options.label_names, options.default_split);
  Corpus corpus;
  corpus.vocab = options.vocab != nullptr ? *options.vocab : BuildVocabulary(records);
  corpus.num_labels = static_cast<int>(options.label_names.size());
  corpus.label_names = options.label_names;
  for (const auto& r : records) corpus.split(r.split).push_back(ToExample(r, corpus.vocab));
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path, const LoadOptions& options) {
  if (!std::filesystem::exists(path)) {
    Fail(ErrorKind::kConfig, "corpus path does not exist: " + path.string());
  }
  if (!std::filesystem::is_directory(path)) return LoadJsonl(path, options);

  LoadOptions opts = options;
  std::optional<Vocabulary> meta_vocab;
  const auto meta_path = path / "metadata.json";
  if (std::filesystem::exists(meta_path)) {
    json meta;
    try {
      meta = json::parse(ReadFile(meta_path));
      opts.label_names = meta.at("label_names").get<std::vector<std::string>>();
      meta_vocab = Vocabulary::FromTokens(meta.at("vocab").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
      Fail(ErrorKind::kInput, meta_path.string() + ": " + e.what());
    }
    if (options.vocab != nullptr && options.vocab->Hash() != meta_vocab->Hash()) {
      Fail(ErrorKind::kConfig, "vocabulary hash mismatch: model expects " +
                                   HashHex(options.vocab->Hash()) + ", corpus declares " +
                                   HashHex(meta_vocab->Hash()));
    }
  }

  std::vector<RawRecord> records;
  for (Split s : kAllSplits) {
    const auto file = path / (std::string(SplitName(s)) + ".jsonl");
    if (!std::filesystem::exists(file)) continue;
    auto part = ParseJsonl(file, opts.label_names, s);
    for (auto& r : part) records.push_back(std::move(r));
  }
  Corpus corpus;
  if (options.vocab != nullptr) {
    corpus.vocab = *options.vocab;
  } else if (meta_vocab) {
    corpus.vocab = *meta_vocab;
  } else {
    corpus.vocab = BuildVocabulary(records);
  }
  corpus.num_labels = static_cast<int>(opts.label_names.size());
  corpus.label_names = opts.label_names;
  for (const auto& r : records) corpus.split(r.split).push_back(ToExample(r, corpus.vocab));
  return corpus;
}

std::string SerializeExample(const PairExample& ex, const Vocabulary& vocab) {
  auto join = [&](const std::vector<std::int32_t>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ' ';
      s += vocab.Token(ids[i]);
    }
    return s;
  };
  json j;
  j["sentence1"] = join(ex.tokens1);
  j["sentence2"] = join(ex.tokens2);
  j["label"] = ex.label;
  j["split"] = SplitName(ex.split);
  return j.dump();
}

void WriteJsonl(const std::filesystem::path& path, std::span<const PairExample> examples,
                const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& ex : examples) out << SerializeExample(ex, vocab) << '\n';
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

void WriteCorpus(const std::filesystem::path& dir, const Corpus& corpus, const DatasetSpec* spec) {
  std::filesystem::create_directories(dir);
  for (Split s : kAllSplits) {
    WriteJsonl(dir / (std::string(SplitName(s)) + ".jsonl"), corpus.split(s), corpus.vocab);
  }
  json meta;
  meta["format"] = "apm-corpus/1";
  if (spec != nullptr) meta["spec"] = SpecToJson(*spec);
  meta["num_labels"] = corpus.num_labels;
  meta["label_names"] = corpus.label_names;
  json counts;
  for (Split s : kAllSplits) counts[SplitName(s)] = corpus.split(s).size();
  meta["counts"] = counts;
  if (spec != nullptr) {
    const auto& train = corpus.split(Split::kTrain);
    auto rate = ConditionalLabelRate(train, spec->overlap_threshold, spec->bias_label, true);
    meta["measured_bias_strength"] = rate ? json(*rate) : json(nullptr);
  }
  meta["vocab_size"] = corpus.vocab.size();
  meta["vocab_hash"] = HashHex(corpus.vocab.Hash());
  meta["content_hash"] = HashHex(corpus.ContentHash());
  meta["vocab"] = corpus.vocab.tokens();
  std::ofstream out(dir / "metadata.json", std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write metadata in " + dir.string());
  out << meta.dump(2) << '\n';
}

std::size_t OverlapBin(double overlap, std::size_t bins) {
  if (overlap <= 0.0) return 0;
  const auto b = static_cast<std::size_t>(overlap * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

OverlapHistogram ComputeOverlapHistogram(std::span<const PairExample> examples, int num_labels,
                                         std::size_t bins) {
  if (bins < 2) Fail(ErrorKind::kInput, "overlap histogram needs at least 2 bins");
  if (examples.empty()) Fail(ErrorKind::kInput, "overlap histogram of an empty corpus");
  OverlapHistogram h;
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  }
  h.counts.assign(bins, 0);
  h.label_freq.assign(bins, std::vector<double>(static_cast<std::size_t>(num_labels), 0.0));
  for (const auto& ex : examples) {
    const std::size_t b = OverlapBin(ex.overlap, bins);
    ++h.counts[b];
    h.label_freq[b][static_cast<std::size_t>(ex.label)] += 1.0;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (h.counts[b] == 0) continue;
    for (double& f : h.label_freq[b]) f /= static_cast<double>(h.counts[b]);
  }
  return h;
}

std::optional<double> ConditionalLabelRate(std::span<const PairExample> examples,
                                           double threshold, int label, bool above) {
  std::size_t n = 0, hit = 0;
  for (const auto& ex : examples) {
    if ((ex.overlap >= threshold) != above) continue;
    ++n;
    if (ex.label == label) ++hit;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(hit) / static_cast<double>(n);
}

}  // namespace apm
