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

#include "apm/optimizer.hpp"

#include <cmath>

#include "apm/errors.hpp"

namespace apm {

AdamW::AdamW(ParameterStore& store, GroupSet groups, AdamWOptions options)
    : store_(&store), groups_(groups), options_(options) {
  m_.resize(store.size());
  v_.resize(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const Parameter& p = store.at(i);
    if (groups_.Contains(p.group)) {
      m_[i] = Tensor(p.value.rows(), p.value.cols());
      v_[i] = Tensor(p.value.rows(), p.value.cols());
    }
  }
}

void AdamW::Step() {
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(options_.beta1, t);
  const double bc2 = 1.0 - std::pow(options_.beta2, t);
  const double lr = options_.lr;
  const double wd = options_.weight_decay;
  for (std::size_t i = 0; i < store_->size(); ++i) {
    Parameter& p = store_->at(i);
    if (!groups_.Contains(p.group) || !p.trainable) continue;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k];
      m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * g;
      v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * g * g;
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      double w = p.value[k];
      w = w - lr * wd * w;
      w = w - lr * mhat / (std::sqrt(vhat) + options_.eps);
      p.value[k] = w;
    }
  }
}

void AdamW::SetState(std::int64_t step, std::vector<Tensor> m, std::vector<Tensor> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    Fail(ErrorKind::kDimension, "optimizer state size mismatch");
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    CheckShapes(m[i].SameShape(m_[i]) && v[i].SameShape(v_[i]), "optimizer state", m[i],
                m_[i]);
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace apm
