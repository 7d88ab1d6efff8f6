/*
 * railenv - GNSS local-error modelling toolkit for railway environments.
 *
 * C interface of the shared library. All functionality is reached through
 * opaque handles and status codes; railenv_last_error() returns a
 * thread-local message for the most recent failure on the calling thread.
 *
 * Status codes double as process exit codes in the bundled CLI:
 *   0 success, 1 usage error, 2 input error, 3 numerical failure.
 */

#ifndef RAILENV_H
#define RAILENV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RAILENV_API __declspec(dllexport)
#else
#define RAILENV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum railenv_status {
    RAILENV_OK = 0,
    RAILENV_ERR_USAGE = 1,
    RAILENV_ERR_INPUT = 2,
    RAILENV_ERR_NUMERIC = 3
} railenv_status;

typedef struct railenv_config railenv_config;
typedef struct railenv_error_models railenv_error_models;

RAILENV_API const char* railenv_version(void);

/* Message for the last failed call on this thread; empty string if none. */
RAILENV_API const char* railenv_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */

RAILENV_API railenv_status railenv_config_load(const char* path, railenv_config** out_config);
RAILENV_API railenv_status railenv_config_from_json(const char* json_text,
                                                    railenv_config** out_config);
RAILENV_API void railenv_config_free(railenv_config* config);

RAILENV_API railenv_status railenv_config_set_seed(railenv_config* config, uint64_t seed);
RAILENV_API railenv_status railenv_config_set_out_dir(railenv_config* config,
                                                      const char* out_dir);

/* Hash of the canonical configuration; embedded in every output file.
 * buffer receives a NUL-terminated hex string (17 bytes suffice). */
RAILENV_API railenv_status railenv_config_hash(const railenv_config* config, char* buffer,
                                               size_t buffer_size);

/* ------------------------------------------------------------------ */
/* Pipeline stages                                                     */
/* Each stage reads the paths named in the configuration and writes its
 * outputs under the configured out_dir. `summary` (optional) receives a
 * NUL-terminated one-line result description. */

RAILENV_API railenv_status railenv_run_extract(const railenv_config* config, char* summary,
                                               size_t summary_size);
RAILENV_API railenv_status railenv_run_featurize(const railenv_config* config, char* summary,
                                                 size_t summary_size);
RAILENV_API railenv_status railenv_run_train(const railenv_config* config, char* summary,
                                             size_t summary_size);
RAILENV_API railenv_status railenv_run_evaluate(const railenv_config* config, char* summary,
                                                size_t summary_size);
RAILENV_API railenv_status railenv_run_fit_errors(const railenv_config* config, char* summary,
                                                  size_t summary_size);
RAILENV_API railenv_status railenv_run_simulate(const railenv_config* config, char* summary,
                                                size_t summary_size);
RAILENV_API railenv_status railenv_run_synth(const railenv_config* config, char* summary,
                                             size_t summary_size);

/* ------------------------------------------------------------------ */
/* Error-model access for external signal simulators                   */

RAILENV_API railenv_status railenv_error_models_load(const char* path,
                                                     railenv_error_models** out_models);
RAILENV_API void railenv_error_models_free(railenv_error_models* models);

/* Gaussian parameters for a (class, constellation, band) key. class_name
 * NULL or unknown resolves to the pooled fallback model. */
RAILENV_API railenv_status railenv_error_models_query(const railenv_error_models* models,
                                                      const char* class_name,
                                                      const char* constellation, const char* band,
                                                      double* mean_m, double* var_m2);

/* One deterministic error draw. Identical arguments give an identical value,
 * matching the stream the `simulate` stage writes for the same seed and
 * (epoch, slot) position. */
RAILENV_API railenv_status railenv_sample_error(const railenv_error_models* models,
                                                const char* class_name, const char* constellation,
                                                const char* band, uint64_t seed,
                                                uint64_t epoch_index, uint64_t slot_index,
                                                double* error_m);

#ifdef __cplusplus
}
#endif

#endif /* RAILENV_H */
