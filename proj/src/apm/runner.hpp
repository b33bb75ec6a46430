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
#include <fstream>
#include <optional>
#include <string>

#include "apm/config.hpp"
#include "apm/data.hpp"
#include "apm/trainer.hpp"

namespace apm {

// Appends timestamped lines to <out>/run.log. Timestamps never reach any
// other output file.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& out_dir, bool echo_stderr = false);
  void Info(const std::string& command, const std::string& message);

 private:
  std::ofstream file_;
  bool echo_;
};

// The configured corpus path, or a corpus generated from the data spec.
Corpus ResolveCorpus(const RunConfig& config, const LoadOptions& options = {});

// Each command writes config.txt (resolved echo plus hash) and its outputs
// into `out`, creating the directory when needed.

// train/dev/id_test/ood_test .jsonl plus metadata.json.
void CmdSynth(const RunConfig& config, const std::filesystem::path& out, bool verbose = false);

// history.csv, ckpt_top1.bin, ckpt_top2.bin, metrics.json, curves_<split>.csv.
// On a non-finite loss the partial history is written before rethrowing.
void CmdTrain(const RunConfig& config, const std::filesystem::path& out, bool verbose = false);

// metrics.json and curves_<split>.csv for the checkpoint on the configured corpus.
void CmdEval(const RunConfig& config, const std::filesystem::path& checkpoint,
             const std::filesystem::path& out, bool verbose = false);

// sweep.csv and sweep_meta.json.
void CmdSweep(const RunConfig& config, const std::filesystem::path& out, bool verbose = false);

// audit_<split>.csv: gold-label frequencies per overlap bin, plus predicted
// frequencies when a checkpoint is given.
void CmdAudit(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint,
              const std::filesystem::path& out, bool verbose = false);

}  // namespace apm
