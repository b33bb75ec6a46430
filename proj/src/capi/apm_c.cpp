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

#include "apm/apm.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "apm/checkpoint.hpp"
#include "apm/config.hpp"
#include "apm/eval.hpp"
#include "apm/runner.hpp"

struct apm_config {
  apm::RunConfig cfg;
};

struct apm_corpus {
  apm::Corpus corpus;
};

struct apm_model {
  apm::Checkpoint ckpt;
  apm::Vocabulary vocab;
};

namespace {

thread_local std::string g_last_error;

apm_status FromKind(apm::ErrorKind k) {
  switch (k) {
    case apm::ErrorKind::kInput: return APM_E_INPUT;
    case apm::ErrorKind::kDimension: return APM_E_DIMENSION;
    case apm::ErrorKind::kNumeric: return APM_E_NUMERIC;
    case apm::ErrorKind::kIo: return APM_E_IO;
    case apm::ErrorKind::kConfig: return APM_E_CONFIG;
    case apm::ErrorKind::kGeneration: return APM_E_GENERATION;
    case apm::ErrorKind::kState: return APM_E_STATE;
  }
  return APM_E_INTERNAL;
}

apm_status Fail(apm_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <typename F>
apm_status Guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return APM_OK;
  } catch (const apm::Error& e) {
    return Fail(FromKind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(APM_E_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(APM_E_IO, e.what());
  } catch (const std::exception& e) {
    return Fail(APM_E_INTERNAL, e.what());
  } catch (...) {
    return Fail(APM_E_INTERNAL, "unknown exception");
  }
}

apm_status CopyOut(const std::string& s, char* buf, size_t cap, size_t* needed) {
  const size_t n = s.size() + 1;
  if (needed != nullptr) *needed = n;
  if (buf == nullptr || cap < n) return Fail(APM_E_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), n);
  g_last_error.clear();
  return APM_OK;
}

#define APM_REQUIRE(cond, what)                                   \
  do {                                                            \
    if (!(cond)) return Fail(APM_E_ARGUMENT, std::string(what)); \
  } while (0)

}  // namespace

extern "C" {

const char* apm_version(void) { return "0.1.0"; }

const char* apm_status_name(apm_status status) {
  switch (status) {
    case APM_OK: return "ok";
    case APM_E_INPUT: return "input error";
    case APM_E_DIMENSION: return "dimension error";
    case APM_E_NUMERIC: return "numeric error";
    case APM_E_IO: return "i/o error";
    case APM_E_CONFIG: return "config error";
    case APM_E_GENERATION: return "generation error";
    case APM_E_STATE: return "state error";
    case APM_E_ARGUMENT: return "invalid argument";
    case APM_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* apm_last_error(void) { return g_last_error.c_str(); }

apm_status apm_config_create(apm_config** out) {
  APM_REQUIRE(out != nullptr, "out is null");
  return Guard([&] { *out = new apm_config{}; });
}

apm_status apm_config_load(const char* path, apm_config** out) {
  APM_REQUIRE(path != nullptr && out != nullptr, "path or out is null");
  return Guard([&] { *out = new apm_config{apm::LoadRunConfig(path)}; });
}

void apm_config_destroy(apm_config* config) { delete config; }

apm_status apm_config_set(apm_config* config, const char* key, const char* value) {
  APM_REQUIRE(config != nullptr && key != nullptr && value != nullptr, "null argument");
  return Guard([&] { config->cfg.Set(key, value); });
}

apm_status apm_config_get(const apm_config* config, const char* key, char* buf, size_t cap,
                          size_t* needed) {
  APM_REQUIRE(config != nullptr && key != nullptr, "null argument");
  std::string value;
  const apm_status s = Guard([&] { value = config->cfg.Get(key); });
  if (s != APM_OK) return s;
  return CopyOut(value, buf, cap, needed);
}

apm_status apm_config_echo(const apm_config* config, char* buf, size_t cap, size_t* needed) {
  APM_REQUIRE(config != nullptr, "config is null");
  return CopyOut(config->cfg.Echo(), buf, cap, needed);
}

apm_status apm_config_hash(const apm_config* config, uint64_t* out) {
  APM_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return Guard([&] { *out = config->cfg.Hash(); });
}

apm_status apm_config_validate(const apm_config* config) {
  APM_REQUIRE(config != nullptr, "config is null");
  return Guard([&] { config->cfg.Validate(); });
}

apm_status apm_cmd_synth(const apm_config* config, const char* out_dir, int verbose) {
  APM_REQUIRE(config != nullptr && out_dir != nullptr, "null argument");
  return Guard([&] { apm::CmdSynth(config->cfg, out_dir, verbose != 0); });
}

apm_status apm_cmd_train(const apm_config* config, const char* out_dir, int verbose) {
  APM_REQUIRE(config != nullptr && out_dir != nullptr, "null argument");
  return Guard([&] { apm::CmdTrain(config->cfg, out_dir, verbose != 0); });
}

apm_status apm_cmd_eval(const apm_config* config, const char* checkpoint, const char* out_dir,
                        int verbose) {
  APM_REQUIRE(config != nullptr && checkpoint != nullptr && out_dir != nullptr, "null argument");
  return Guard([&] { apm::CmdEval(config->cfg, checkpoint, out_dir, verbose != 0); });
}

apm_status apm_cmd_sweep(const apm_config* config, const char* out_dir, int verbose) {
  APM_REQUIRE(config != nullptr && out_dir != nullptr, "null argument");
  return Guard([&] { apm::CmdSweep(config->cfg, out_dir, verbose != 0); });
}

apm_status apm_cmd_audit(const apm_config* config, const char* checkpoint, const char* out_dir,
                         int verbose) {
  APM_REQUIRE(config != nullptr && out_dir != nullptr, "null argument");
  return Guard([&] {
    std::optional<std::filesystem::path> ckpt;
    if (checkpoint != nullptr) ckpt = checkpoint;
    apm::CmdAudit(config->cfg, ckpt, out_dir, verbose != 0);
  });
}

apm_status apm_corpus_generate(const apm_config* config, apm_corpus** out) {
  APM_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return Guard([&] { *out = new apm_corpus{apm::GenerateCorpus(config->cfg.data)}; });
}

apm_status apm_corpus_load(const char* path, apm_corpus** out) {
  APM_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return Guard([&] { *out = new apm_corpus{apm::LoadCorpus(path)}; });
}

void apm_corpus_destroy(apm_corpus* corpus) { delete corpus; }

apm_status apm_corpus_split_size(const apm_corpus* corpus, const char* split, size_t* out) {
  APM_REQUIRE(corpus != nullptr && split != nullptr && out != nullptr, "null argument");
  return Guard([&] { *out = corpus->corpus.split(apm::SplitFromName(split)).size(); });
}

apm_status apm_corpus_content_hash(const apm_corpus* corpus, uint64_t* out) {
  APM_REQUIRE(corpus != nullptr && out != nullptr, "null argument");
  return Guard([&] { *out = corpus->corpus.ContentHash(); });
}

apm_status apm_model_load(const char* checkpoint, apm_model** out) {
  APM_REQUIRE(checkpoint != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    auto* m = new apm_model{apm::LoadCheckpoint(checkpoint), {}};
    m->vocab = apm::Vocabulary::FromTokens(m->ckpt.vocab);
    *out = m;
  });
}

void apm_model_destroy(apm_model* model) { delete model; }

apm_status apm_model_info(const apm_model* model, int64_t* step, double* dev_acc,
                          double* delta) {
  APM_REQUIRE(model != nullptr, "model is null");
  if (step != nullptr) *step = model->ckpt.step;
  if (dev_acc != nullptr) *dev_acc = model->ckpt.dev_acc;
  if (delta != nullptr) *delta = model->ckpt.delta;
  g_last_error.clear();
  return APM_OK;
}

apm_status apm_model_accuracy(apm_model* model, const apm_corpus* corpus, const char* split,
                              double delta, double* out) {
  APM_REQUIRE(model != nullptr && corpus != nullptr && split != nullptr && out != nullptr,
              "null argument");
  return Guard([&] {
    if (model->vocab.Hash() != corpus->corpus.vocab.Hash()) {
      apm::Fail(apm::ErrorKind::kConfig, "vocabulary hash mismatch between model and corpus");
    }
    *out = apm::Accuracy(model->ckpt.model, corpus->corpus.split(apm::SplitFromName(split)),
                         delta);
  });
}

apm_status apm_sequence_similarity(const int32_t* x1, size_t n, const int32_t* x2, size_t k,
                                   double* out) {
  APM_REQUIRE(out != nullptr && (n == 0 || x1 != nullptr) && (k == 0 || x2 != nullptr),
              "null argument");
  return Guard([&] { *out = apm::SequenceSimilarity({x1, n}, {x2, k}); });
}

}  // extern "C"
