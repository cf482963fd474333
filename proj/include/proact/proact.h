#ifndef PROACT_PROACT_H
#define PROACT_PROACT_H

/* Stable C interface to the proactive-testing core.
 *
 * Conventions:
 *  - Every fallible call returns a proact_status; on failure
 *    proact_last_error() describes it (thread-local, valid until the next
 *    call on the same thread).
 *  - Strings returned through char** are heap-allocated UTF-8 and must be
 *    released with proact_string_free.
 *  - Handles are opaque; free them with their matching *_free function.
 *  - JSON inputs may be NULL where noted, meaning "defaults".
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PROACT_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PROACT_API __attribute__((visibility("default")))
#else
#define PROACT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum proact_status {
  PROACT_OK = 0,
  PROACT_E_INVALID_ARGUMENT = 1,
  PROACT_E_EMPTY_CORPUS = 2,
  PROACT_E_MISSING_CLASS = 3,
  PROACT_E_EMPTY_TEXT = 4,
  PROACT_E_BAD_THRESHOLDS = 5,
  PROACT_E_BAD_WEIGHTS = 6,
  PROACT_E_TOO_SHORT = 7,
  PROACT_E_SESSION_CLOSED = 8,
  PROACT_E_LABEL_MATCHES_PREDICTION = 9,
  PROACT_E_ALREADY_RESOLVED = 10,
  PROACT_E_ADJUDICATION_INCOMPLETE = 11,
  PROACT_E_ADJUDICATION_PENDING = 12,
  PROACT_E_NO_SEED_ERRORS_AVAILABLE = 13,
  PROACT_E_NOTHING_TO_JUDGE = 14,
  PROACT_E_DUPLICATE_JUDGMENT = 15,
  PROACT_E_UNKNOWN_ASSIGNMENT = 16,
  PROACT_E_QUORUM_NOT_MET = 17,
  PROACT_E_NOT_FOUND = 18,
  PROACT_E_IDEMPOTENCY_CONFLICT = 19,
  PROACT_E_DUPLICATE_CATEGORY = 20,
  PROACT_E_CORRUPT_LOG = 21,
  PROACT_E_MODEL_MISSING = 22,
  PROACT_E_IO = 23,
  PROACT_E_PARSE = 24,
  PROACT_E_INTERNAL = 99
} proact_status;

typedef struct proact_model proact_model;
typedef struct proact_service proact_service;

PROACT_API const char* proact_last_error(void);
/* Machine-readable name such as "TOO_SHORT". Never NULL. */
PROACT_API const char* proact_status_name(proact_status status);
PROACT_API void proact_string_free(char* s);

/* ---- model ---------------------------------------------------------------- */

/* Trains naive Bayes on a text,label CSV (alpha <= 0 means 1.0). */
PROACT_API proact_status proact_model_train_csv(const char* corpus_path, double alpha, proact_model** out);
PROACT_API proact_status proact_model_load(const char* path, proact_model** out);
PROACT_API proact_status proact_model_save(const proact_model* model, const char* path);
PROACT_API void proact_model_free(proact_model* model);

/* {"label","probabilities":{...},"confidence"} */
PROACT_API proact_status proact_model_predict(const proact_model* model, const char* text, char** out_json);
/* Explanation JSON with per-token spans, weights, buckets and colors.
 * config_json is a platform configuration (only "explain" and "buckets" are
 * read) or NULL. */
PROACT_API proact_status proact_model_explain(const proact_model* model, const char* text, const char* config_json,
                                              char** out_json);

/* ---- service -------------------------------------------------------------- */

/* Opens a service over the event log at log_path (NULL or "" keeps events in
 * memory). model may be NULL; prediction routes then answer 503. The service
 * keeps its own reference to the model. */
PROACT_API proact_status proact_service_open(const proact_model* model, const char* config_json,
                                             const char* log_path, proact_service** out);
PROACT_API void proact_service_free(proact_service* service);

/* Routes one HTTP-shaped request. query is "a=1&b=2" (may be NULL); headers_json
 * is an object of header names to values (may be NULL). The call succeeds
 * whenever a response was produced, including 4xx/5xx ones. */
PROACT_API proact_status proact_service_request(proact_service* service, const char* method, const char* path,
                                                const char* query, const char* headers_json, const char* body,
                                                int* out_status, char** out_content_type, char** out_body);

/* Blocks serving HTTP until the process stops. */
PROACT_API proact_status proact_service_serve(proact_service* service, const char* host, int port);

PROACT_API proact_status proact_service_state_hash(proact_service* service, uint64_t* out_hash);
PROACT_API proact_status proact_service_export_csv(proact_service* service, char** out_csv);
/* Strict summary: fails with ADJUDICATION_PENDING while claims await quorum,
 * unless allow_pending is non-zero. */
PROACT_API proact_status proact_service_summary_json(proact_service* service, int allow_pending, char** out_json);

/* Predicts a text,label CSV and stores the misclassified rows as seed samples.
 * out_json: {"total","misclassified","stored"}; out_csv (may be NULL) receives
 * the stored rows as Text,Human_Label,AI_Label,Category. */
PROACT_API proact_status proact_service_import_benchmark(proact_service* service, const char* csv_path,
                                                         char** out_json, char** out_csv);

/* Uniformly samples n stored misclassified seeds without replacement. */
PROACT_API proact_status proact_service_sample_misclassified(proact_service* service, size_t n, uint64_t seed,
                                                             size_t* out_count, size_t* out_pool, char** out_csv);

/* ---- simulation and replay -------------------------------------------------- */

/* Runs a scenario (JSON, NULL for defaults) into log_path (NULL or "" keeps it
 * in memory). out_report_json and out_csv may be NULL. */
PROACT_API proact_status proact_simulate(const proact_model* model, const char* scenario_json, const char* log_path,
                                         char** out_report_json, char** out_csv);

/* Rebuilds state from a log and reports its hash and event count. */
PROACT_API proact_status proact_replay(const char* log_path, uint64_t* out_hash, uint64_t* out_events);

#ifdef __cplusplus
}
#endif

#endif /* PROACT_PROACT_H */
