// SPDX-License-Identifier: Apache-2.0
//
// eesim: energy-efficiency optimization for UAV-relayed THz NOMA links
// Copyright (C) 2026 The eesim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef EESIM_EESIM_H
#define EESIM_EESIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EESIM_API __declspec(dllexport)
#else
#define EESIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eesim_status
{
    EESIM_OK = 0,
    EESIM_ERR_DEGENERATE_GEOMETRY = 1,
    EESIM_ERR_INVALID_PARAMETER = 2,
    EESIM_ERR_NON_POSITIVE_POWER = 3,
    EESIM_ERR_INFEASIBLE = 4,
    EESIM_ERR_MAX_ITERATIONS = 5,
    EESIM_ERR_LINE_SEARCH_STALL = 6,
    EESIM_ERR_SURROGATE_COLLAPSE = 7,
    EESIM_ERR_ORACLE_TOO_LARGE = 8,
    EESIM_ERR_CONFIG = 9,
    EESIM_ERR_IO = 10,
    EESIM_ERR_NULL_ARGUMENT = 11,
    EESIM_ERR_INTERNAL = 12
} eesim_status;

typedef struct eesim_config eesim_config;
typedef struct eesim_results eesim_results;

typedef struct eesim_record
{
    const char *sweep;  /* Owned by the results handle */
    double sweep_value;
    const char *method; /* Owned by the results handle */
    size_t trial;
    uint64_t seed;
    double final_ee;    /* Mbit/J, NaN on failure */
    int converged;
    double wall_time_s;
    const char *error;  /* Empty unless the run failed */
} eesim_record;

typedef struct eesim_oracle_row
{
    size_t trial;
    double sweep_value;
    double proposed_ee;  /* Mbit/J */
    double oracle_ee;    /* Mbit/J */
    size_t evaluated;    /* Grid points visited */
    int oracle_exact;    /* 0 when a slot-coupling constraint forced a restricted search */
    int joint;           /* 1: joint position and power grid; 0: power grid on the proposed path */
} eesim_oracle_row;

typedef void (*eesim_progress_fn)(size_t done, size_t total, void *user);

EESIM_API const char *eesim_version(void);
EESIM_API const char *eesim_status_name(eesim_status status);
/* Message of the last failure on the calling thread */
EESIM_API const char *eesim_last_error(void);
EESIM_API void eesim_string_free(char *s);

EESIM_API eesim_status eesim_config_default(eesim_config **out);
EESIM_API eesim_status eesim_config_load(const char *path, eesim_config **out);
EESIM_API eesim_status eesim_config_parse(const char *json, eesim_config **out);
EESIM_API void eesim_config_free(eesim_config *cfg);
EESIM_API eesim_status eesim_config_save(const eesim_config *cfg, const char *path);
EESIM_API eesim_status eesim_config_to_json(const eesim_config *cfg, char **out);
EESIM_API eesim_status eesim_config_validate(const eesim_config *cfg);

/* Selecting a sweep resets its values to the built-in list */
EESIM_API eesim_status eesim_config_set_sweep(eesim_config *cfg, const char *name);
EESIM_API eesim_status eesim_config_set_sweep_values(eesim_config *cfg, const double *values, size_t count);
EESIM_API eesim_status eesim_config_set_trials(eesim_config *cfg, size_t trials);
EESIM_API eesim_status eesim_config_set_seed(eesim_config *cfg, uint64_t seed);
/* Comma-separated, e.g. "proposed,a,e" */
EESIM_API eesim_status eesim_config_set_methods(eesim_config *cfg, const char *methods);
EESIM_API eesim_status eesim_config_set_output(eesim_config *cfg, const char *path);
EESIM_API eesim_status eesim_config_set_workers(eesim_config *cfg, size_t workers);
EESIM_API eesim_status eesim_config_get_output(const eesim_config *cfg, const char **out);

/* Feasibility pre-check of the initial point for every sweep value and trial */
EESIM_API eesim_status eesim_validate(const eesim_config *cfg, char **report);

EESIM_API eesim_status eesim_run_sweep(const eesim_config *cfg, eesim_progress_fn progress, void *user,
                                       eesim_results **out);
EESIM_API size_t eesim_results_count(const eesim_results *res);
EESIM_API size_t eesim_results_failures(const eesim_results *res);
EESIM_API eesim_status eesim_results_get(const eesim_results *res, size_t index, eesim_record *out);
/* Writes the CSV and the sibling config JSON */
EESIM_API eesim_status eesim_results_write(const eesim_results *res, const eesim_config *cfg, const char *path);
EESIM_API eesim_status eesim_results_read(const char *path, eesim_results **out);
EESIM_API void eesim_results_free(eesim_results *res);

/* Proposed method against a grid search on the first sweep value, one row per trial.
   N <= 3 searches positions and powers jointly; longer missions search powers on the proposed path. */
EESIM_API eesim_status eesim_oracle(const eesim_config *cfg, size_t power_resolution, double step_m,
                                    eesim_oracle_row *rows, size_t capacity, size_t *written);

#ifdef __cplusplus
}
#endif

#endif
