/* pigletcatch — C API for the object-catching simulation and learning library.
 *
 * Usage pattern:
 *   pgc_context* ctx = NULL;
 *   if (pgc_context_create(config_json_or_NULL, &ctx) != PGC_OK) { ... }
 *   pgc_set(ctx, "pipeline.predictor", "\"cnn\"");
 *   if (pgc_eval(ctx, 20, "out/") != PGC_OK)
 *     fprintf(stderr, "%s\n", pgc_last_error(ctx));
 *   char* summary = NULL;
 *   pgc_last_result_json(ctx, &summary);   // JSON of the last command
 *   pgc_string_free(summary);
 *   pgc_context_destroy(ctx);
 *
 * All functions taking a context are NOT thread-safe on the same handle;
 * use one context per thread. Results are deterministic in (config, seed).
 */
#ifndef PIGLETCATCH_H
#define PIGLETCATCH_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pgc_context pgc_context;

typedef enum pgc_status {
  PGC_OK = 0,
  PGC_E_USAGE = 1,    /* bad arguments or configuration */
  PGC_E_CHECK = 2,    /* a command-level assertion failed (tof bands, gradcheck) */
  PGC_E_IO = 3,       /* file could not be read or written */
  PGC_E_STATE = 4,    /* missing prerequisite, e.g. weights for a CNN pipeline */
  PGC_E_INTERNAL = 5, /* unexpected failure */
} pgc_status;

const char* pgc_version(void);
const char* pgc_status_name(pgc_status status);

/* Effective default configuration as pretty-printed JSON (static storage). */
const char* pgc_default_config_json(void);

/* Creates a context from a JSON configuration; NULL or "" uses defaults.
 * Unknown keys are rejected. */
pgc_status pgc_context_create(const char* config_json, pgc_context** out_context);
pgc_status pgc_context_create_from_file(const char* config_path,
                                        pgc_context** out_context);
void pgc_context_destroy(pgc_context* context);

/* Message for the most recent failing call on this context. */
const char* pgc_last_error(const pgc_context* context);

/* Effective configuration of this context (JSON, malloc'd; free with
 * pgc_string_free). */
pgc_status pgc_context_config_json(const pgc_context* context, char** out_json);

/* Applies one override at a dotted path, e.g.
 *   pgc_set(ctx, "seed", "7")
 *   pgc_set(ctx, "pipeline.localizer", "\"cnn\"")
 *   pgc_set(ctx, "models.interceptor.weights", "run/interceptor.pgnn")
 * Bare strings may be passed unquoted. */
pgc_status pgc_set(pgc_context* context, const char* dotted_key, const char* json_value);

/* Commands. out_dir may be NULL (no files written). Each stores a JSON
 * summary retrievable via pgc_last_result_json. */
pgc_status pgc_simulate(pgc_context* context, const char* out_dir);
pgc_status pgc_eval(pgc_context* context, int n_throws, const char* out_dir);
pgc_status pgc_compare(pgc_context* context, int n_throws, const char* out_dir);
/* Returns PGC_E_CHECK when a TOF median leaves its measured band. */
pgc_status pgc_tof(pgc_context* context, int n_per_distance, const char* out_dir);
pgc_status pgc_blur_study(pgc_context* context, const char* out_dir);
/* Returns PGC_E_CHECK when any gradient check exceeds the 1e-4 tolerance. */
pgc_status pgc_gradcheck(pgc_context* context, const char* out_dir);
pgc_status pgc_gen_trajectory_data(pgc_context* context, const char* out_dir);
pgc_status pgc_gen_localizer_data(pgc_context* context, const char* out_dir);
/* data_dir NULL: synthesize the dataset from the configuration. */
pgc_status pgc_train_interceptor(pgc_context* context, const char* data_dir,
                                 const char* out_dir);
pgc_status pgc_train_localizer(pgc_context* context, const char* data_dir,
                               const char* out_dir);

/* JSON summary of the last successful command (malloc'd; free with
 * pgc_string_free). */
pgc_status pgc_last_result_json(const pgc_context* context, char** out_json);
void pgc_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PIGLETCATCH_H */
