/*
 * Copyright 2026 The FogForge Authors. All Rights Reserved.
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

#ifndef FOGFORGE_FOGFORGE_H_
#define FOGFORGE_FOGFORGE_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define FF_API __attribute__((visibility("default")))
#else
#define FF_API
#endif

typedef enum ff_status {
  FF_OK = 0,
  FF_ERR_VALIDATION = 1,  /* malformed or inconsistent input */
  FF_ERR_EMPTY = 2,       /* a stage left nothing to work with */
  FF_ERR_NOT_FOUND = 3,   /* unknown option id */
  FF_ERR_IO = 4,
  FF_ERR_RUNTIME = 5,     /* emulation failures and anything else */
  FF_ERR_ARGUMENT = 6     /* null handle or pointer */
} ff_status;

typedef struct ff_engine ff_engine;
typedef struct ff_server ff_server;

/* Called with the stage name as each funnel stage starts. */
typedef void (*ff_progress_fn)(const char *stage, void *user);

/* Message of the last failure on this thread, "" if none. Valid until the next call. */
FF_API const char *ff_last_error(void);
/* Error code name of the last failure on this thread, e.g. "SchemaError". */
FF_API const char *ff_last_error_code(void);
FF_API const char *ff_version(void);
/* "trace", "debug", "info", "warn", "error" or "off". */
FF_API ff_status ff_set_log_level(const char *level);
/* Releases strings returned through char** outputs. */
FF_API void ff_free(char *s);

/* Loads a pipeline config file and the models it names. */
FF_API ff_status ff_engine_open(const char *config_path, ff_engine **out);
FF_API void ff_engine_close(ff_engine *engine);
/* Output directory of the engine; owned by the engine. */
FF_API const char *ff_engine_output_dir(const ff_engine *engine);
/* Setters discard results computed so far. */
FF_API ff_status ff_engine_set_output(ff_engine *engine, const char *dir);
FF_API ff_status ff_engine_set_jobs(ff_engine *engine, int jobs);
FF_API ff_status ff_engine_set_percentile(ff_engine *engine, double fraction);
FF_API ff_status ff_engine_set_emulation(ff_engine *engine, int enabled);
FF_API ff_status ff_engine_set_dump_samples(ff_engine *engine, int enabled);
FF_API ff_status ff_engine_set_seed(ff_engine *engine, uint64_t seed);

/* Each command writes a JSON document to *json_out (release with ff_free). */
FF_API ff_status ff_count(ff_engine *engine, char **json_out);
FF_API ff_status ff_sample(ff_engine *engine, uint64_t n, char **json_out);
FF_API ff_status ff_prune(ff_engine *engine, char **json_out);
FF_API ff_status ff_simulate(ff_engine *engine, char **json_out);
FF_API ff_status ff_shortlist(ff_engine *engine, char **json_out);
FF_API ff_status ff_emulate(ff_engine *engine, char **json_out);
/* Full funnel; *json_out holds the funnel.json bytes. */
FF_API ff_status ff_run(ff_engine *engine, ff_progress_fn progress, void *user, char **json_out);
/* Simulates {"placement": {...}, "hardware": {...}}. */
FF_API ff_status ff_evaluate(ff_engine *engine, const char *mapping_json, char **json_out);
/* Plain-text narrative for one option of a run directory. */
FF_API ff_status ff_explain(const char *output_dir, const char *option_id, char **text_out);

FF_API ff_status ff_server_open(const char *data_dir, ff_server **out);
/* Blocks until ff_server_stop. */
FF_API ff_status ff_server_listen(ff_server *server, const char *host, int port);
/* Binds an ephemeral port; follow with ff_server_listen_after_bind. */
FF_API ff_status ff_server_bind_any(ff_server *server, const char *host, int *port_out);
FF_API ff_status ff_server_listen_after_bind(ff_server *server);
FF_API ff_status ff_server_stop(ff_server *server);
FF_API void ff_server_close(ff_server *server);

#ifdef __cplusplus
}
#endif

#endif /* FOGFORGE_FOGFORGE_H_ */
