/* ptelm — parameter-transfer extreme learning machine toolkit.
 *
 * C interface to the shared library. All functions return a ptelm_status;
 * on failure, ptelm_last_error() describes the most recent error on the
 * calling thread. Objects are opaque handles created by the _create and
 * _load functions and released with the matching _free (safe on NULL).
 */
#ifndef PTELM_H
#define PTELM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define PTELM_API
#elif defined(PTELM_BUILD)
#  define PTELM_API __attribute__((visibility("default")))
#else
#  define PTELM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ptelm_status {
    PTELM_OK = 0,
    PTELM_ERROR_INVALID = 1, /* null handles, bad shapes, misuse */
    PTELM_ERROR_CONFIG = 2,  /* invalid configuration */
    PTELM_ERROR_DATA = 3,    /* unreadable/ill-formed data, bad labels */
    PTELM_ERROR_NUMERIC = 4  /* factorization failure, non-finite values */
} ptelm_status;

/* Library version string, e.g. "0.1.0". */
PTELM_API const char* ptelm_version(void);

/* Message of the last error raised on this thread ("" when none). The
 * pointer stays valid until the next library call on the same thread. */
PTELM_API const char* ptelm_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */

typedef struct ptelm_dataset ptelm_dataset;

/* Loads a comma-separated numeric file. label_column is 0-based; negative
 * values count from the end (-1 = last column). Labels are remapped to a
 * dense 0..c-1 range in ascending raw-value order. */
PTELM_API ptelm_status ptelm_dataset_load_csv(const char* path, int has_header,
                                              long label_column, ptelm_dataset** out);

/* Builds a dataset from row-major features and integer labels. Pass
 * class_count = 0 to infer it as max(label) + 1. */
PTELM_API ptelm_status ptelm_dataset_create(const double* features, size_t rows, size_t cols,
                                            const int* labels, int class_count,
                                            ptelm_dataset** out);

PTELM_API ptelm_status ptelm_dataset_dims(const ptelm_dataset* dataset, size_t* rows,
                                          size_t* cols, int* class_count);

/* Column-wise zero-mean unit-variance transform in place (population
 * convention; constant columns are centered only). */
PTELM_API ptelm_status ptelm_dataset_standardize(ptelm_dataset* dataset);

PTELM_API void ptelm_dataset_free(ptelm_dataset* dataset);

/* ------------------------------------------------------------------ */
/* Baseline ELM                                                        */

typedef struct ptelm_elm_model ptelm_elm_model;

/* activation is one of "sigmoid", "tanh", "relu". */
PTELM_API ptelm_status ptelm_elm_train(const ptelm_dataset* train, size_t hidden_nodes,
                                       const char* activation, double lambda, uint64_t seed,
                                       ptelm_elm_model** out);

/* Predicts labels for `rows` row-major feature vectors; labels_out must
 * hold `rows` ints. */
PTELM_API ptelm_status ptelm_elm_predict(const ptelm_elm_model* model, const double* features,
                                         size_t rows, size_t cols, int* labels_out);

PTELM_API void ptelm_elm_model_free(ptelm_elm_model* model);

/* ------------------------------------------------------------------ */
/* Parameter-transfer model                                            */

typedef struct ptelm_hyperparams {
    double lambda1;          /* source-fit weight */
    double lambda2;          /* row-sparsity weight */
    double lambda3;          /* target-weight shrinkage */
    size_t hidden_nodes;
    const char* activation;  /* "sigmoid" | "tanh" | "relu" */
    double epsilon;          /* row-norm smoothing in the reweighted solve */
    double delta;            /* ridge scale for the projection update */
    size_t inner_max_iters;
    double inner_tol;
    size_t outer_max_iters;
    double outer_tol;
} ptelm_hyperparams;

/* Fills in the documented defaults: lambda = (1, 30, 10), 500 sigmoid
 * nodes, epsilon = delta = 1e-8, 30 inner iterations at tol 1e-5, 10 outer
 * iterations at tol 1e-6. */
PTELM_API void ptelm_hyperparams_init(ptelm_hyperparams* hp);

typedef struct ptelm_transfer_model ptelm_transfer_model;

PTELM_API ptelm_status ptelm_transfer_train(const ptelm_dataset* source,
                                            const ptelm_dataset* target,
                                            const ptelm_hyperparams* hp, uint64_t seed,
                                            ptelm_transfer_model** out);

PTELM_API ptelm_status ptelm_transfer_predict(const ptelm_transfer_model* model,
                                              const double* features, size_t rows, size_t cols,
                                              int* labels_out);

/* Objective value after each outer optimization round. The pointer aims at
 * model-owned storage and stays valid until the model is freed. */
PTELM_API ptelm_status ptelm_transfer_trace(const ptelm_transfer_model* model,
                                            const double** values, size_t* count);

PTELM_API void ptelm_transfer_model_free(ptelm_transfer_model* model);

/* Fraction of agreeing positions between two label vectors. */
PTELM_API ptelm_status ptelm_accuracy(const int* predicted, const int* actual, size_t count,
                                      double* out);

/* ------------------------------------------------------------------ */
/* Experiments                                                         */

typedef struct ptelm_experiment ptelm_experiment;

/* Parses a flat key=value experiment config (see README for the keys). */
PTELM_API ptelm_status ptelm_experiment_create(const char* config_path, ptelm_experiment** out);

/* Overrides one config key, same names and formats as the file. */
PTELM_API ptelm_status ptelm_experiment_set(ptelm_experiment* experiment, const char* key,
                                            const char* value);

/* Runs all trials and writes the report files into the output directory. */
PTELM_API ptelm_status ptelm_experiment_run(ptelm_experiment* experiment);

/* Runs the experiment once per grid value with `param` (lambda1 | lambda2 |
 * lambda3 | L) overridden; writes per-value reports plus a combined curve. */
PTELM_API ptelm_status ptelm_experiment_sweep(ptelm_experiment* experiment, const char* param,
                                              const double* grid, size_t count);

/* Writes only the split manifests of one trial (no training). */
PTELM_API ptelm_status ptelm_experiment_write_splits(ptelm_experiment* experiment,
                                                     size_t trial_index);

PTELM_API ptelm_status ptelm_experiment_method_count(const ptelm_experiment* experiment,
                                                     size_t* count);

/* Name of the index-th configured method; the pointer is static. */
PTELM_API ptelm_status ptelm_experiment_method_name(const ptelm_experiment* experiment,
                                                    size_t index, const char** name);

/* Aggregate accuracy of one method ("elm_s" | "elm_t" | "ptelm") after a
 * successful ptelm_experiment_run. */
PTELM_API ptelm_status ptelm_experiment_mean_accuracy(const ptelm_experiment* experiment,
                                                      const char* method, double* out);
PTELM_API ptelm_status ptelm_experiment_stddev_accuracy(const ptelm_experiment* experiment,
                                                        const char* method, double* out);

PTELM_API void ptelm_experiment_free(ptelm_experiment* experiment);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PTELM_H */
