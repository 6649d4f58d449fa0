#ifndef ODSE_H
#define ODSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API function.
 */
typedef enum OdseStatus {
  OdseStatus_Ok = 0,
  OdseStatus_NullPointer = 1,
  OdseStatus_InvalidUtf8 = 2,
  OdseStatus_InvalidArgument = 3,
  OdseStatus_IoError = 4,
  OdseStatus_ParseError = 5,
  OdseStatus_Degenerate = 6,
  OdseStatus_InternalError = 7,
} OdseStatus;

/**
 * Opaque dataset handle (train/validation/test splits plus class labels).
 */
typedef struct OdseDataset OdseDataset;

/**
 * Opaque trained-model handle.
 */
typedef struct OdseModelHandle OdseModelHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version string; owned by the library, do not free.
 */
const char *odse_version(void);

/**
 * Message describing the most recent failure on this thread. Owned by the
 * library; valid until the next API call on the same thread.
 */
const char *odse_last_error_message(void);

/**
 * Releases a string returned by this API.
 *
 * # Safety
 * `s` must have been returned by an odse function and not freed before.
 */
void odse_string_free(char *s);

/**
 * Loads a dataset from a master manifest (or dataset directory).
 * `format` is `"gxl-collection"` or `"native"`.
 *
 * # Safety
 * `manifest_path` and `format` must be valid NUL-terminated strings;
 * `out_dataset` must be a valid destination pointer.
 */
enum OdseStatus odse_dataset_load(const char *manifest_path,
                                  const char *format,
                                  struct OdseDataset **out_dataset);

/**
 * Generates a synthetic letter-like dataset (see the `generate` CLI
 * command).
 *
 * # Safety
 * `out_dataset` must be a valid destination pointer.
 */
enum OdseStatus odse_dataset_generate(uintptr_t classes,
                                      uintptr_t per_class,
                                      double noise,
                                      uint64_t seed,
                                      struct OdseDataset **out_dataset);

/**
 * Split sizes and class count of a dataset. Null output pointers are
 * skipped.
 *
 * # Safety
 * `dataset` must be a live handle from this API.
 */
enum OdseStatus odse_dataset_counts(const struct OdseDataset *dataset,
                                    uintptr_t *out_train,
                                    uintptr_t *out_validation,
                                    uintptr_t *out_test,
                                    uintptr_t *out_classes);

/**
 * Releases a dataset handle.
 *
 * # Safety
 * `dataset` must be a live handle from this API (or null).
 */
void odse_dataset_free(struct OdseDataset *dataset);

/**
 * Synthesizes a model on the dataset. `config_json` holds the optimizer
 * configuration (all fields optional, e.g. `{"variant":"v1-mst","seed":7}`);
 * pass null or `"{}"` for defaults. On success, `out_metrics_json` (when
 * non-null) receives the training metrics; free it with
 * `odse_string_free`.
 *
 * # Safety
 * Pointer arguments must be valid as documented above.
 */
enum OdseStatus odse_train(const struct OdseDataset *dataset,
                           const char *config_json,
                           struct OdseModelHandle **out_model,
                           char **out_metrics_json);

/**
 * Persists a model as a self-contained JSON bundle.
 *
 * # Safety
 * `model` must be a live handle; `path` a valid NUL-terminated string.
 */
enum OdseStatus odse_model_save(const struct OdseModelHandle *model, const char *path);

/**
 * Loads a persisted model bundle.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out_model` a valid
 * destination pointer.
 */
enum OdseStatus odse_model_load(const char *path, struct OdseModelHandle **out_model);

/**
 * Releases a model handle.
 *
 * # Safety
 * `model` must be a live handle from this API (or null).
 */
void odse_model_free(struct OdseModelHandle *model);

/**
 * Embedding dimension (prototype count) of a trained model.
 *
 * # Safety
 * `model` must be a live handle; `out_size` a valid destination pointer.
 */
enum OdseStatus odse_model_rs_size(const struct OdseModelHandle *model, uintptr_t *out_size);

/**
 * Evaluates a model on the test split of a dataset. `out_report_json`
 * (when non-null) receives the accuracy and confusion counts; free it with
 * `odse_string_free`.
 *
 * # Safety
 * Pointer arguments must be valid as documented above.
 */
enum OdseStatus odse_evaluate(const struct OdseModelHandle *model,
                              const struct OdseDataset *dataset,
                              double *out_accuracy,
                              char **out_report_json);

/**
 * Symmetric TWEC dissimilarity in [0, 2] between two graphs given as
 * native-format JSON objects (`{"id", "vertices", "edges"}`). `weights`
 * must point to six values in [0, 1]: vertex sub/ins/del then edge
 * sub/ins/del. Label measure parameters are both in [0, 1].
 *
 * # Safety
 * Pointer arguments must be valid as documented above.
 */
enum OdseStatus odse_twec_distance(const char *graph_json_a,
                                   const char *graph_json_b,
                                   const double *weights,
                                   double real_vector_scale,
                                   double symbol_mismatch,
                                   double *out_distance);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ODSE_H */
