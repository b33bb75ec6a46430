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

#include <filesystem>
#include <string>

#include "apm/trainer.hpp"

namespace apm {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, little-endian:
//   "APMCKPT\0" | u32 version | model config | step, dev_acc, delta, config_hash
//   | vocab | label names | parameters (name, group, shape, values)
//   | main optimizer | pm optimizer | u64 FNV-1a of everything before it
std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace apm
