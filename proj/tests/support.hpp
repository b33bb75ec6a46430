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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "apm/autograd.hpp"
#include "apm/data.hpp"
#include "apm/errors.hpp"
#include "apm/model.hpp"
#include "apm/rng.hpp"

namespace apm::testing {

struct GradCheck {
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

// Relative error with a floor on the denominator so entries whose true
// gradient is ~0 are judged on absolute error.
inline double RelErr(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

// Central differences on every entry of the selected parameters (all when
// `stride` is 1) against the reverse-mode gradient of `loss`.
inline GradCheck CheckGradients(ParameterStore& params, const std::function<Var()>& loss,
                                double h = 1e-5, std::size_t stride = 1) {
  params.ZeroGrad();
  Backward(loss());
  std::vector<Tensor> analytic;
  for (std::size_t i = 0; i < params.size(); ++i) analytic.push_back(params.at(i).grad);

  GradCheck out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.at(i);
    for (std::size_t k = 0; k < p.value.size(); k += stride) {
      const double orig = p.value[k];
      p.value[k] = orig + h;
      const double up = loss()->value.item();
      p.value[k] = orig - h;
      const double down = loss()->value.item();
      p.value[k] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double err = RelErr(analytic[i][k], numeric);
      ++out.checked;
      if (err > out.max_rel_err) {
        out.max_rel_err = err;
        out.worst = p.name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return out;
}

inline ModelConfig TinyModel(Method method, int vocab = 30) {
  ModelConfig mc;
  mc.method = method;
  mc.vocab_size = vocab;
  mc.num_labels = 3;
  mc.emb_dim = 4;
  mc.z_dim = 8;
  mc.z2_dim = 2;
  mc.lip_hidden = 3;
  mc.pm_hidden = 3;
  return mc;
}

// Random pairs with distinct token lists on each side so |u−v| stays away from 0.
inline std::vector<PairExample> RandomPairs(std::uint64_t seed, std::size_t n, int vocab,
                                            int num_labels = 3) {
  Rng rng(seed);
  std::vector<PairExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    PairExample ex;
    const auto len1 = rng.UniformInt(2, 6);
    const auto len2 = rng.UniformInt(2, 6);
    for (int j = 0; j < len1; ++j) ex.tokens1.push_back(static_cast<std::int32_t>(rng.UniformInt(1, vocab - 1)));
    for (int j = 0; j < len2; ++j) ex.tokens2.push_back(static_cast<std::int32_t>(rng.UniformInt(1, vocab - 1)));
    ex.label = static_cast<int>(rng.UniformInt(0, num_labels - 1));
    ex.overlap = SequenceSimilarity(ex.tokens1, ex.tokens2);
    out.push_back(std::move(ex));
  }
  return out;
}

// Small generated corpus for fast end-to-end tests.
inline DatasetSpec SmallSpec(std::uint64_t seed = 3) {
  DatasetSpec s;
  s.vocab_size = 60;
  s.n_train = 600;
  s.n_dev = 200;
  s.n_id_test = 200;
  s.n_ood_test = 200;
  s.seed = seed;
  return s;
}

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::string tmpl = (std::filesystem::temp_directory_path() / ("apm-" + tag + "-XXXXXX")).string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace apm::testing
