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

#include "apm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "apm/hash.hpp"

namespace apm {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

constexpr char kMagic[8] = {'A', 'P', 'M', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  template <typename T>
  void Pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void Str(const std::string& s) {
    Pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void Mat(const Tensor& t) {
    Pod<std::uint32_t>(static_cast<std::uint32_t>(t.rows()));
    Pod<std::uint32_t>(static_cast<std::uint32_t>(t.cols()));
    for (double x : t.data()) Pod(x);
  }
  void Raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : in_(bytes), end_(end) {}

  template <typename T>
  T Pod() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string Str() {
    const auto n = Pod<std::uint32_t>();
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Tensor Mat() {
    const auto r = Pod<std::uint32_t>();
    const auto c = Pod<std::uint32_t>();
    Need(static_cast<std::size_t>(r) * c * sizeof(double));
    Tensor t(r, c);
    for (double& x : t.data()) x = Pod<double>();
    return t;
  }
  std::size_t pos() const { return pos_; }

 private:
  void Need(std::size_t n) const {
    if (end_ - pos_ < n) Fail(ErrorKind::kIo, "checkpoint truncated");
  }
  const std::string& in_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

void WriteOptimizer(Writer& w, const OptimizerSnapshot& s) {
  w.Pod<std::int64_t>(s.step);
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(s.m.size()));
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    w.Mat(s.m[i]);
    w.Mat(s.v[i]);
  }
}

OptimizerSnapshot ReadOptimizer(Reader& r) {
  OptimizerSnapshot s;
  s.step = r.Pod<std::int64_t>();
  const auto n = r.Pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    s.m.push_back(r.Mat());
    s.v.push_back(r.Mat());
  }
  return s;
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  Writer w;
  w.Raw(kMagic, sizeof(kMagic));
  w.Pod<std::uint32_t>(kCheckpointVersion);
  const ModelConfig& mc = ckpt.model.config();
  w.Pod<std::uint8_t>(static_cast<std::uint8_t>(mc.method));
  for (int v : {mc.vocab_size, mc.num_labels, mc.emb_dim, mc.z_dim, mc.z2_dim, mc.lip_hidden,
                mc.pm_hidden}) {
    w.Pod<std::int32_t>(v);
  }
  w.Pod<std::int64_t>(ckpt.step);
  w.Pod<double>(ckpt.dev_acc);
  w.Pod<double>(ckpt.delta);
  w.Pod<std::uint64_t>(ckpt.config_hash);
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(ckpt.vocab.size()));
  for (const auto& t : ckpt.vocab) w.Str(t);
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(ckpt.label_names.size()));
  for (const auto& t : ckpt.label_names) w.Str(t);

  const ParameterStore& ps = ckpt.model.params();
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(ps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Parameter& p = ps.at(i);
    w.Str(p.name);
    w.Pod<std::uint8_t>(static_cast<std::uint8_t>(p.group));
    w.Mat(p.value);
  }
  WriteOptimizer(w, ckpt.main_optimizer);
  WriteOptimizer(w, ckpt.pm_optimizer);
  const std::uint64_t h = Fnv1a64(w.bytes());
  w.Pod<std::uint64_t>(h);
  return std::move(w.bytes());
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  constexpr std::size_t kTrailer = sizeof(std::uint64_t);
  if (bytes.size() < sizeof(kMagic) + 4 + kTrailer ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    Fail(ErrorKind::kIo, "not a checkpoint file (bad magic)");
  }
  const std::size_t body = bytes.size() - kTrailer;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, kTrailer);
  if (Fnv1a64(std::string_view(bytes.data(), body)) != stored) {
    Fail(ErrorKind::kIo, "checkpoint content hash mismatch");
  }

  Reader r(bytes, body);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.Pod<char>();
  const auto version = r.Pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    Fail(ErrorKind::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig mc;
  const auto method = r.Pod<std::uint8_t>();
  if (method > static_cast<std::uint8_t>(Method::kBetaVae)) {
    Fail(ErrorKind::kIo, "checkpoint: unknown method id");
  }
  mc.method = static_cast<Method>(method);
  for (int* f : {&mc.vocab_size, &mc.num_labels, &mc.emb_dim, &mc.z_dim, &mc.z2_dim,
                 &mc.lip_hidden, &mc.pm_hidden}) {
    *f = r.Pod<std::int32_t>();
  }

  Checkpoint c;
  c.step = r.Pod<std::int64_t>();
  c.dev_acc = r.Pod<double>();
  c.delta = r.Pod<double>();
  c.config_hash = r.Pod<std::uint64_t>();
  for (auto n = r.Pod<std::uint32_t>(); n > 0; --n) c.vocab.push_back(r.Str());
  for (auto n = r.Pod<std::uint32_t>(); n > 0; --n) c.label_names.push_back(r.Str());

  c.model = Model(mc, 0);
  ParameterStore& ps = c.model.params();
  const auto count = r.Pod<std::uint32_t>();
  if (count != ps.size()) Fail(ErrorKind::kIo, "checkpoint: parameter count mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Parameter& p = ps.at(i);
    const std::string name = r.Str();
    const auto group = r.Pod<std::uint8_t>();
    Tensor value = r.Mat();
    if (name != p.name || group != static_cast<std::uint8_t>(p.group) ||
        !value.SameShape(p.value)) {
      Fail(ErrorKind::kIo, "checkpoint: parameter '" + name + "' does not match the model layout");
    }
    p.value = std::move(value);
  }
  c.main_optimizer = ReadOptimizer(r);
  c.pm_optimizer = ReadOptimizer(r);
  if (r.pos() != body) Fail(ErrorKind::kIo, "checkpoint: trailing bytes");
  return c;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = SerializeCheckpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return DeserializeCheckpoint(ss.str());
}

}  // namespace apm
