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
#include <vector>

#include "apm/parameter.hpp"

namespace apm {

struct AdamWOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Adaptive-moment optimizer with decoupled weight decay over the parameters
// of a fixed set of groups. Moments are indexed by store position.
class AdamW {
 public:
  AdamW(ParameterStore& store, GroupSet groups, AdamWOptions options);

  void Step();

  std::int64_t step_count() const { return step_; }
  const AdamWOptions& options() const { return options_; }
  GroupSet groups() const { return groups_; }

  // Moment tensors aligned with store order; untouched groups hold empty tensors.
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }
  void SetState(std::int64_t step, std::vector<Tensor> m, std::vector<Tensor> v);

 private:
  ParameterStore* store_;
  GroupSet groups_;
  AdamWOptions options_;
  std::int64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace apm
