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

#include "apm/parameter.hpp"

#include <array>
#include <cmath>

#include "apm/errors.hpp"
#include "apm/rng.hpp"

namespace apm {
namespace {

constexpr std::array<const char*, kNumGroups> kGroupNames = {
    "embedding", "encoder", "decoder", "head1", "head2", "head3", "lip", "pm"};

}  // namespace

const char* GroupName(Group g) { return kGroupNames[static_cast<int>(g)]; }

Group GroupFromName(std::string_view name) {
  for (int i = 0; i < kNumGroups; ++i) {
    if (name == kGroupNames[i]) return static_cast<Group>(i);
  }
  Fail(ErrorKind::kInput, "unknown parameter group '" + std::string(name) + "'");
}

ParameterStore::ParameterStore(const ParameterStore& other) { *this = other; }

ParameterStore& ParameterStore::operator=(const ParameterStore& other) {
  if (this == &other) return *this;
  params_.clear();
  params_.reserve(other.params_.size());
  for (const auto& p : other.params_) params_.push_back(std::make_unique<Parameter>(*p));
  return *this;
}

Parameter& ParameterStore::Add(std::string name, Group group, Tensor value) {
  if (Find(name) != nullptr) {
    Fail(ErrorKind::kState, "duplicate parameter '" + name + "'");
  }
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->group = group;
  p->grad = Tensor(value.rows(), value.cols());
  p->value = std::move(value);
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::AddWeight(std::string name, Group group, std::size_t rows,
                                     std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor w(rows, cols);
  for (double& x : w.data()) x = rng.Uniform(-limit, limit);
  return Add(std::move(name), group, std::move(w));
}

Parameter& ParameterStore::AddBias(std::string name, Group group, std::size_t cols) {
  return Add(std::move(name), group, Tensor(1, cols));
}

Parameter* ParameterStore::Find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

Parameter& ParameterStore::Get(std::string_view name) {
  Parameter* p = Find(name);
  if (p == nullptr) Fail(ErrorKind::kState, "no parameter named '" + std::string(name) + "'");
  return *p;
}

const Parameter& ParameterStore::Get(std::string_view name) const {
  return const_cast<ParameterStore*>(this)->Get(name);
}

void ParameterStore::ZeroGrad() { ZeroGrad(GroupSet::All()); }

void ParameterStore::ZeroGrad(GroupSet groups) {
  for (auto& p : params_) {
    if (groups.Contains(p->group)) p->grad.Fill(0.0);
  }
}

std::vector<Tensor> ParameterStore::Snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterStore::Restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) {
    Fail(ErrorKind::kDimension, "restore: parameter count mismatch");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    CheckShapes(values[i].SameShape(params_[i]->value), "restore", values[i],
                params_[i]->value);
    params_[i]->value = values[i];
  }
}

}  // namespace apm
