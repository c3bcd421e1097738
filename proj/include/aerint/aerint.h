/*
 * Copyright 2026 The aerint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AERINT_AERINT_H
#define AERINT_AERINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AERINT_BUILDING_LIBRARY)
#    define AER_API __declspec(dllexport)
#  else
#    define AER_API __declspec(dllimport)
#  endif
#else
#  define AER_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum aer_status {
    AER_OK = 0,
    AER_ERR_INTERNAL = 1,
    AER_ERR_INVALID = 2,   /* bad configuration or argument */
    AER_ERR_VIOLATION = 3, /* protocol, timing or tolerance violation detected */
    AER_ERR_IO = 4
} aer_status;

typedef struct aer_arbiter aer_arbiter;
typedef struct aer_cam aer_cam;

AER_API const char* aer_version(void);

/* Message of the last failing call on this thread; "" if none. */
AER_API const char* aer_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
AER_API void aer_free(char* text);

/* Closed-form model. `arch`: binary-tree, greedy-tree, token-ring,
 * hier-ring, hier-tree. `quantity`: sparse, burst or area. */
AER_API aer_status aer_analytic(const char* arch, const char* quantity, uint32_t n, int64_t* num, int64_t* den);

AER_API aer_status aer_arbiter_create(const char* arch, uint32_t n, uint64_t seed, aer_arbiter** out);
AER_API void aer_arbiter_destroy(aer_arbiter* arbiter);
AER_API aer_status aer_arbiter_cell_count(const aer_arbiter* arbiter, uint64_t* cells);
AER_API aer_status aer_arbiter_measure_sparse(aer_arbiter* arbiter, uint64_t trials, uint64_t seed, double* mean,
                                              double* ci95);
AER_API aer_status aer_arbiter_measure_burst(aer_arbiter* arbiter, uint64_t* total);
/* Feeds `count` simultaneous requests; writes the encoded address of each
 * output, in output order, and returns AER_ERR_VIOLATION on overlapping
 * grants. */
AER_API aer_status aer_arbiter_run_burst(aer_arbiter* arbiter, const uint32_t* neurons, size_t count,
                                         uint32_t* addresses);

/* `config_json` keys: entries, width, completion ("delay-line"|"cscd"),
 * feedback, speculative, sense-threshold, seed. NULL takes the defaults. */
AER_API aer_status aer_cam_create(const char* config_json, aer_cam** out);
AER_API void aer_cam_destroy(aer_cam* cam);
AER_API aer_status aer_cam_write(aer_cam* cam, uint32_t index, uint64_t word);
/* `flags` receives one byte per entry. Returns AER_ERR_VIOLATION when the
 * delay line fired early; outputs are still written. */
AER_API aer_status aer_cam_search(aer_cam* cam, uint64_t key, uint8_t* flags, size_t flags_len, uint64_t* cycle_time,
                                  double* energy);

AER_API aer_status aer_speculative_probability(unsigned width, unsigned n_tail, int64_t* num, int64_t* den);

/* Runs a CLI subcommand ("arb run", "arb tables", "sweep", "cam search",
 * "cam report", "demo"). Either JSON argument may be NULL; flag values
 * override file values. `trace_csv` may be NULL; when given, commands that
 * trace return the trace there. */
AER_API aer_status aer_execute(const char* command, const char* file_json, const char* flags_json, char** output,
                               char** trace_csv);

/* Runs every checker on a trace CSV; `report_json` gets the violations. */
AER_API aer_status aer_check_trace(const char* trace_csv, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* AERINT_AERINT_H */
