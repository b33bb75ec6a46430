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

#ifndef APM_APM_H_
#define APM_APM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define APM_API __declspec(dllexport)
#else
#define APM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum apm_status {
  APM_OK = 0,
  APM_E_INPUT = 1,
  APM_E_DIMENSION = 2,
  APM_E_NUMERIC = 3,
  APM_E_IO = 4,
  APM_E_CONFIG = 5,
  APM_E_GENERATION = 6,
  APM_E_STATE = 7,
  APM_E_ARGUMENT = 8,
  APM_E_INTERNAL = 9
} apm_status;

typedef struct apm_config apm_config;
typedef struct apm_corpus apm_corpus;
typedef struct apm_model apm_model;

APM_API const char* apm_version(void);
APM_API const char* apm_status_name(apm_status status);

/* Message of the last failed call on this thread; "" when none. */
APM_API const char* apm_last_error(void);

/* Strings are copied into caller buffers. `needed` (optional) receives the
   size including the terminator; a NULL or short buffer yields
   APM_E_ARGUMENT with `needed` filled. */

APM_API apm_status apm_config_create(apm_config** out);
APM_API apm_status apm_config_load(const char* path, apm_config** out);
APM_API void apm_config_destroy(apm_config* config);
APM_API apm_status apm_config_set(apm_config* config, const char* key, const char* value);
APM_API apm_status apm_config_get(const apm_config* config, const char* key, char* buf,
                                  size_t cap, size_t* needed);
APM_API apm_status apm_config_echo(const apm_config* config, char* buf, size_t cap,
                                   size_t* needed);
APM_API apm_status apm_config_hash(const apm_config* config, uint64_t* out);
APM_API apm_status apm_config_validate(const apm_config* config);

/* Commands. Each writes its files plus config.txt and run.log into out_dir. */
APM_API apm_status apm_cmd_synth(const apm_config* config, const char* out_dir, int verbose);
APM_API apm_status apm_cmd_train(const apm_config* config, const char* out_dir, int verbose);
APM_API apm_status apm_cmd_eval(const apm_config* config, const char* checkpoint,
                                const char* out_dir, int verbose);
APM_API apm_status apm_cmd_sweep(const apm_config* config, const char* out_dir, int verbose);
/* `checkpoint` may be NULL for a corpus-only audit. */
APM_API apm_status apm_cmd_audit(const apm_config* config, const char* checkpoint,
                                 const char* out_dir, int verbose);

APM_API apm_status apm_corpus_generate(const apm_config* config, apm_corpus** out);
APM_API apm_status apm_corpus_load(const char* path, apm_corpus** out);
APM_API void apm_corpus_destroy(apm_corpus* corpus);
/* split: "train", "dev", "id_test" or "ood_test". */
APM_API apm_status apm_corpus_split_size(const apm_corpus* corpus, const char* split,
                                         size_t* out);
APM_API apm_status apm_corpus_content_hash(const apm_corpus* corpus, uint64_t* out);

APM_API apm_status apm_model_load(const char* checkpoint, apm_model** out);
APM_API void apm_model_destroy(apm_model* model);
APM_API apm_status apm_model_info(const apm_model* model, int64_t* step, double* dev_acc,
                                  double* delta);
APM_API apm_status apm_model_accuracy(apm_model* model, const apm_corpus* corpus,
                                      const char* split, double delta, double* out);

APM_API apm_status apm_sequence_similarity(const int32_t* x1, size_t n, const int32_t* x2,
                                           size_t k, double* out);

#ifdef __cplusplus
}
#endif

#endif /* APM_APM_H_ */
