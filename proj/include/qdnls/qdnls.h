#ifndef QDNLS_QDNLS_H
#define QDNLS_QDNLS_H

/* C interface to the quintic derivative NLS laboratory.
 *
 * Every fallible call returns a qdnls_status; on failure the message is
 * available from qdnls_last_error() on the same thread until the next call.
 * Strings handed out through `char** out` are owned by the caller and
 * released with qdnls_string_free(). Requests and reports are JSON text. */

#include <stddef.h>
#include <stdint.h>

#if defined(QDNLS_BUILDING_LIBRARY)
#define QDNLS_API __attribute__((visibility("default")))
#else
#define QDNLS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdnls_status {
  QDNLS_OK = 0,
  QDNLS_E_INVALID = 1,   /* malformed request or violated precondition */
  QDNLS_E_DOMAIN = 2,    /* state left the model's domain */
  QDNLS_E_NUMERICAL = 3, /* integrator breakdown */
  QDNLS_E_IO = 4,
  QDNLS_E_INTERNAL = 5
} qdnls_status;

/* Experiment configuration (grid, quad, mu, K0, ...). */
typedef struct qdnls_config qdnls_config;

/* A spectral field loaded from a checkpoint. */
typedef struct qdnls_field qdnls_field;

QDNLS_API const char* qdnls_version(void);

/* Message of the last failure on this thread; "" when none. */
QDNLS_API const char* qdnls_last_error(void);

QDNLS_API void qdnls_string_free(char* s);

/* NULL or "" gives the defaults. Unknown keys are rejected. */
QDNLS_API qdnls_status qdnls_config_create(const char* json, qdnls_config** out);
QDNLS_API void qdnls_config_destroy(qdnls_config* cfg);

/* Fully resolved config, defaults included. */
QDNLS_API qdnls_status qdnls_config_to_json(const qdnls_config* cfg, char** out);

/* Cluster, non-degeneracy, gaps and dichotomy scan for Lambda(m, n). */
QDNLS_API qdnls_status qdnls_resonance_report(int64_t m, int64_t n, char** json_out);

/* Reduced (phi1, K) flow. Request keys: mu, K0, phi1, variant, tol, horizon,
 * stride, find_period. horizon 0 means one full period when one exists,
 * 100/|mu| otherwise. csv_path may be NULL. */
QDNLS_API qdnls_status qdnls_reduced_run(const char* request, const char* csv_path,
                                         char** json_out);

/* Four-mode toy model. Request keys: M, N, mu, lambda, K0, phases, M0, P0,
 * flavor, frame, tol, horizon, stride. lambda defaults to 20 (M+N). */
QDNLS_API qdnls_status qdnls_toy_run(const char* request, const char* csv_path,
                                     char** json_out);

/* PDE from the canonical cluster data. horizon 0 is the guaranteed window.
 * csv_path and checkpoint_path may be NULL. */
QDNLS_API qdnls_status qdnls_pde_run(const qdnls_config* cfg, double horizon,
                                     const char* csv_path, const char* checkpoint_path,
                                     char** json_out);

QDNLS_API qdnls_status qdnls_field_load(const char* path, qdnls_field** out);
QDNLS_API void qdnls_field_destroy(qdnls_field* f);

/* t, cutoff, grid, lambda, mu and the conserved triple of a loaded field. */
QDNLS_API qdnls_status qdnls_field_info(const qdnls_field* f, char** json_out);

/* Reduced vs toy vs PDE on one config; writes CSVs when out_dir is set. */
QDNLS_API qdnls_status qdnls_compare(const qdnls_config* cfg, char** json_out);

/* Scaled-equation check at lambda'; printed_form != 0 uses the alternate mu'. */
QDNLS_API qdnls_status qdnls_scaling_check(const qdnls_config* cfg, double lambda_prime,
                                           int printed_form, char** json_out);

/* Called once per finished criterion with its one-line summary. */
typedef void (*qdnls_progress_fn)(const char* line, int passed, void* user);

/* Acceptance criteria `ids` (all when count is 0). *all_passed is set to 1
 * only if every criterion passed. A failed criterion is not an error. */
QDNLS_API qdnls_status qdnls_verify(const int* ids, size_t count, qdnls_progress_fn progress,
                                    void* user, int* all_passed, char** json_out);

#ifdef __cplusplus
}
#endif

#endif
