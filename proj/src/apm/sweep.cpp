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

#include "apm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "apm/eval.hpp"
#include "apm/format.hpp"
#include "apm/rng.hpp"
#include "apm/trainer.hpp"

namespace apm {
namespace {

struct Job {
  std::vector<std::size_t> cells;
  double train_delta = 0.0;
  double lambda = 0.0;
  int z2_dim = 0;
  std::uint64_t seed = 0;
};

void RunJob(const Job& job, const Corpus& corpus, const RunConfig& config,
            std::vector<SweepCell>& cells) {
  ModelConfig mc = config.ResolvedModel();
  mc.method = Method::kCausalApm;
  mc.z2_dim = job.z2_dim;
  TrainConfig tc = config.train;
  tc.seed = job.seed;
  tc.delta = job.train_delta;
  tc.lambda_final = job.lambda;
  TrainResult result = Train(corpus, mc, tc);
  Model& model = result.checkpoints.front().model;
  for (std::size_t i : job.cells) {
    SweepCell& c = cells[i];
    c.id_acc = Accuracy(model, corpus.split(Split::kIdTest), c.delta);
    c.ood_acc = Accuracy(model, corpus.split(Split::kOodTest), c.delta);
  }
}

}  // namespace

std::uint64_t SweepCellSeed(std::uint64_t base_seed, std::size_t index) {
  return Rng::Substream(base_seed, "sweep-cell", index).Next() & 0xffffffffULL;
}

std::string SweepResult::ToCsv() const {
  std::ostringstream os;
  os << "delta,z2_dim,lambda,id_acc,ood_acc,seed\n";
  for (const auto& c : cells) {
    os << FormatDouble(c.delta) << ',' << c.z2_dim << ',' << FormatDouble(c.lambda) << ','
       << FormatDouble(c.id_acc) << ',' << FormatDouble(c.ood_acc) << ',' << c.seed << '\n';
  }
  return os.str();
}

SweepResult RunSweep(const Corpus& corpus, const RunConfig& config) {
  config.Validate();
  const auto& sw = config.sweep;
  SweepResult result;
  result.mode = sw.mode;
  std::vector<Job> jobs;

  auto add_cell = [&](std::uint64_t base, int dim, double delta, double lambda, bool ablation) {
    SweepCell c;
    c.delta = delta;
    c.z2_dim = dim;
    c.lambda = lambda;
    c.replicate = base;
    c.ablation = ablation;
    c.seed = SweepCellSeed(base, result.cells.size());
    result.cells.push_back(c);
    return result.cells.size() - 1;
  };

  for (std::uint64_t base : sw.seeds) {
    for (int dim : sw.z2_dims) {
      if (sw.mode == SweepMode::kRetrain) {
        for (double d : sw.deltas) {
          const std::size_t i = add_cell(base, dim, d, config.train.lambda_final, false);
          jobs.push_back({{i}, d, config.train.lambda_final, dim, result.cells[i].seed});
        }
      } else {
        Job job{{}, config.train.delta, config.train.lambda_final, dim, 0};
        for (double d : sw.deltas) {
          job.cells.push_back(add_cell(base, dim, d, config.train.lambda_final, false));
        }
        job.seed = result.cells[job.cells.front()].seed;
        for (std::size_t i : job.cells) result.cells[i].seed = job.seed;
        jobs.push_back(std::move(job));
      }
    }
  }
  if (sw.ablation) {
    for (std::uint64_t base : sw.seeds) {
      for (int dim : sw.z2_dims) {
        const std::size_t i = add_cell(base, dim, config.train.delta, 0.0, true);
        jobs.push_back({{i}, config.train.delta, 0.0, dim, result.cells[i].seed});
      }
    }
  }

  unsigned threads = sw.threads > 0 ? static_cast<unsigned>(sw.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        RunJob(jobs[j], corpus, config, result.cells);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace apm
