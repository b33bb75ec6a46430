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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "apm/tensor.hpp"

namespace apm {

class Rng;

// Parameter groups carry the gradient-gating contract: each loss component
// may only write gradients into the groups its gate lists.
enum class Group : std::uint8_t {
  kEmbedding = 0,
  kEncoder,
  kDecoder,
  kHead1,
  kHead2,
  kHead3,
  kLip,
  kPm,
};

inline constexpr int kNumGroups = 8;

const char* GroupName(Group g);
Group GroupFromName(std::string_view name);  // throws kInput on unknown names

// Bit set over Group.
class GroupSet {
 public:
  constexpr GroupSet() = default;
  constexpr GroupSet(std::initializer_list<Group> groups) {
    for (Group g : groups) bits_ |= Bit(g);
  }
  static constexpr GroupSet All() {
    GroupSet s;
    s.bits_ = (1u << kNumGroups) - 1;
    return s;
  }
  static constexpr GroupSet AllExcept(Group g) {
    GroupSet s = All();
    s.bits_ &= ~Bit(g);
    return s;
  }

  constexpr void Insert(Group g) { bits_ |= Bit(g); }
  constexpr bool Contains(Group g) const { return (bits_ & Bit(g)) != 0; }
  constexpr bool Empty() const { return bits_ == 0; }
  constexpr bool operator==(const GroupSet&) const = default;

 private:
  static constexpr std::uint32_t Bit(Group g) { return 1u << static_cast<int>(g); }
  std::uint32_t bits_ = 0;
};

struct Parameter {
  std::string name;
  Group group;
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

// Owns model parameters at stable addresses, in registration order.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  // Weight matrices draw from U(±sqrt(6/(fan_in+fan_out))); biases start at zero.
  Parameter& AddWeight(std::string name, Group group, std::size_t rows, std::size_t cols,
                       Rng& rng);
  Parameter& AddBias(std::string name, Group group, std::size_t cols);

  Parameter& Get(std::string_view name);
  const Parameter& Get(std::string_view name) const;
  Parameter* Find(std::string_view name);

  std::size_t size() const { return params_.size(); }
  Parameter& at(std::size_t i) { return *params_[i]; }
  const Parameter& at(std::size_t i) const { return *params_[i]; }

  void ZeroGrad();
  void ZeroGrad(GroupSet groups);

  // Values only; used for checkpoint equality and isolation checks.
  std::vector<Tensor> Snapshot() const;
  void Restore(const std::vector<Tensor>& values);

 private:
  Parameter& Add(std::string name, Group group, Tensor value);

  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace apm
