/*
 * C API for the semantic brand score pipeline.
 *
 * All state lives behind the opaque sbs_pipeline handle. Functions return
 * sbs_status codes; the last error message is retrievable per handle.
 * Handles are not thread-safe; use one per thread.
 */

#ifndef SBS_H
#define SBS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sbs_status {
    SBS_OK = 0,
    SBS_ERR_CONFIG = 1, /* configuration or validation problem */
    SBS_ERR_DATA = 2,   /* malformed or inconsistent input data */
    SBS_ERR_INTERNAL = 3,
} sbs_status;

typedef struct sbs_pipeline sbs_pipeline;

/* Library version string, e.g. "1.0.0". */
const char* sbs_version(void);

/*
 * Loads the JSON config at config_path and returns a handle through *out.
 * On failure *out is NULL unless the handle could still be allocated to
 * carry the error message; a non-NULL handle must always be closed.
 */
sbs_status sbs_pipeline_open(const char* config_path, sbs_pipeline** out);

/*
 * Overrides one config field (flag > config > default). Keys mirror the
 * config document: window, min_weight, output_dir, threads, lag, seed,
 * split, repetitions, corpus, corpus_format, aliases, stopwords, lexicon,
 * outcomes, reference_entity, nb_encoding, concordance_predictor.
 * Must be called before the first stage runs.
 */
sbs_status sbs_pipeline_set_option(sbs_pipeline* p, const char* key, const char* value);

/*
 * Runs one stage: "preprocess", "network", "score", "analyze" or "run".
 * Stages may be invoked in any order; each computes what it needs.
 */
sbs_status sbs_pipeline_run_stage(sbs_pipeline* p, const char* stage);

/* Message for the most recent failure on this handle; never NULL. */
const char* sbs_pipeline_last_error(const sbs_pipeline* p);

/* Warnings accumulated across the stages run so far. */
size_t sbs_pipeline_warning_count(const sbs_pipeline* p);
const char* sbs_pipeline_warning(const sbs_pipeline* p, size_t index);

/* Resolved output directory of the pipeline. */
const char* sbs_pipeline_output_dir(const sbs_pipeline* p);

void sbs_pipeline_close(sbs_pipeline* p);

#ifdef __cplusplus
}
#endif

#endif /* SBS_H */
