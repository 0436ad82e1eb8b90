// Copyright 2026 The DAS Authors
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

/* C interface to the Delegation Authority Service.
 *
 * Every call returns a das_status. On failure a message is available from
 * das_last_error() until the next call on the same thread. Strings returned
 * through out-parameters are owned by the caller and released with
 * das_string_free(). All JSON is UTF-8.
 */
#ifndef DAS_H_
#define DAS_H_

#include <stdint.h>

#if defined(_WIN32)
#define DAS_API __declspec(dllexport)
#else
#define DAS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum das_status {
  DAS_OK = 0,
  DAS_ERR_INVALID_ARGUMENT = 1,
  DAS_ERR_PARSE = 2,
  DAS_ERR_CONFIG = 3,
  DAS_ERR_IO = 4,
  DAS_ERR_KEY_UNAVAILABLE = 5,
  DAS_ERR_INVALID_SIGNATURE = 6,
  DAS_ERR_SCOPE_NOT_IN_PARENT = 7,
  DAS_ERR_EMPTY_INTENT = 8,
  DAS_ERR_CLASSIFIER_UNAVAILABLE = 9,
  DAS_ERR_MALFORMED_CHAIN = 10,
  DAS_ERR_UNKNOWN_TOKEN = 11,
  DAS_ERR_UNKNOWN_PARENT_TOKEN = 12,
  DAS_ERR_UNKNOWN_USER = 13,
  DAS_ERR_UNKNOWN_ROLE = 14,
  DAS_ERR_NOT_IN_MANIFEST = 15,
  DAS_ERR_ORPHAN_TOKEN = 16,
  DAS_ERR_DUPLICATE_TOKEN = 17,
  DAS_ERR_BROKEN_CHAIN = 18,
  DAS_ERR_THRESHOLD_NOT_MET = 19,
  DAS_ERR_INTERNAL = 20
} das_status;

typedef struct das_service das_service;
typedef struct das_server das_server;

DAS_API const char* das_status_name(das_status status);
DAS_API const char* das_last_error(void);
DAS_API void das_string_free(char* s);

/* config_json: registry document, or NULL for the shipped default.
 * options_json: NULL or {"switchboard": "P1+P2", "audit_log": "path",
 *   "key_file": "path", "revoke_on_violation": true, "bench_registry": false}. */
DAS_API das_status das_service_create(const char* config_json, const char* options_json,
                                      das_service** out);
DAS_API void das_service_destroy(das_service* service);

/* Same routes as the HTTP API ("POST /delegations", ...). body_json may be
 * NULL. */
DAS_API das_status das_request(das_service* service, const char* method, const char* path,
                               const char* body_json, int* http_status, char** response_json);

DAS_API das_status das_server_start(das_service* service, const char* host, int port,
                                    das_server** out, int* bound_port);
/* Blocks until das_server_stop is called from another thread. */
DAS_API das_status das_server_wait(das_server* server);
DAS_API das_status das_server_stop(das_server* server);
DAS_API void das_server_destroy(das_server* server);

/* Forensic audit. format is "table" or "raw" (JSON). *clean is 1 when no
 * violation was found. key_file may be NULL, in which case an offline audit
 * cannot check signatures. */
DAS_API das_status das_audit_chain(das_service* service, const char* token_id, const char* format,
                                   char** report, int* clean);
DAS_API das_status das_audit_log(const char* log_path, const char* key_file, const char* token_id,
                                 const char* format, char** report, int* clean);
DAS_API das_status das_audit_server(const char* host, int port, const char* token_id,
                                    const char* format, char** report, int* clean);

/* Evaluation harness. Reports are JSON documents; those with a table form
 * carry it under "text". */
DAS_API das_status das_bench_generate_corpus(uint64_t seed, char** ndjson);
/* options_json: {"switchboard": "all", "name": "Full System",
 *   "transport": "in_process" | "http", "outcomes": false} */
DAS_API das_status das_bench_run(const char* corpus_ndjson, const char* options_json,
                                 char** report_json);
DAS_API das_status das_bench_ablate(const char* corpus_ndjson, const char* options_json,
                                    char** report_json);
DAS_API das_status das_redteam(char** report_json);
DAS_API das_status das_latency(uint32_t iterations, char** report_json);
DAS_API das_status das_meta_verify(uint32_t workers, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* DAS_H_ */
