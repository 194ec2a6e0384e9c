#ifndef HFTS_H
#define HFTS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Modified band depth.
 */
#define HFTS_DEPTH_MBD 0

/**
 * Generalized band depth.
 */
#define HFTS_DEPTH_GBD 1

/**
 * Sum of children's moving functional medians.
 */
#define HFTS_METHOD_AGGREGATED_MEDIAN 0

/**
 * Moving mean baseline.
 */
#define HFTS_METHOD_MOVING_MEAN 1

typedef enum HftsStatus {
  HFTS_STATUS_OK = 0,
  HFTS_STATUS_NULL_POINTER = 1,
  HFTS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed configuration, hierarchy or file.
   */
  HFTS_STATUS_CONFIG_ERROR = 3,
  /**
   * Data incompatible with the request (shapes, history length, ...).
   */
  HFTS_STATUS_DATA_ERROR = 4,
  /**
   * Numerical domain failure.
   */
  HFTS_STATUS_NUMERIC_ERROR = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  HFTS_STATUS_PANIC = 6,
} HftsStatus;

/**
 * A loaded hierarchy with one functional time series per node.
 */
typedef struct HftsHierarchy HftsHierarchy;

/**
 * Per-level and per-node accuracy of a rolling backtest.
 */
typedef struct HftsReport HftsReport;

/**
 * A sample of curves on a common grid.
 */
typedef struct HftsSample HftsSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a successful call.
 * The pointer stays valid until the next `hfts_*` call on the same thread.
 */
const char *hfts_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hfts_version(void);

/**
 * Builds a sample from `n_curves * n_points` row-major values. `grid` holds `n_points`
 * strictly increasing points, or is NULL for a uniform grid over [0, 1].
 *
 * # Safety
 * `values` must point to `n_curves * n_points` doubles, `grid` (if not NULL) to
 * `n_points` doubles, and `out` must be writable.
 */
enum HftsStatus hfts_sample_new(const double *values,
                                size_t n_curves,
                                size_t n_points,
                                const double *grid,
                                struct HftsSample **out);

/**
 * # Safety
 * `sample` must come from `hfts_sample_new` and not be used afterwards. NULL is ignored.
 */
void hfts_sample_free(struct HftsSample *sample);

/**
 * Depth of every curve with respect to the sample; `out` receives `n_curves` values.
 *
 * # Safety
 * `sample` must be a live handle and `out` must have room for `n_curves` doubles.
 */
enum HftsStatus hfts_depths(const struct HftsSample *sample, uint32_t kind, double *out);

/**
 * Modified epigraph index of every curve; `out` receives `n_curves` values.
 *
 * # Safety
 * As for `hfts_depths`.
 */
enum HftsStatus hfts_mei(const struct HftsSample *sample, double *out);

/**
 * Deepest curve (mean of the deepest curves on ties); `out` receives `n_points` values.
 *
 * # Safety
 * `sample` must be a live handle and `out` must have room for `n_points` doubles.
 */
enum HftsStatus hfts_functional_median(const struct HftsSample *sample, uint32_t kind, double *out);

/**
 * Loads a hierarchy from a JSON configuration and its CSV node files.
 *
 * # Safety
 * `config_path` must be a NUL-terminated UTF-8 path and `out` writable.
 */
enum HftsStatus hfts_hierarchy_load(const char *config_path, struct HftsHierarchy **out);

/**
 * Number of nodes, series length and grid size of a hierarchy.
 *
 * # Safety
 * `hierarchy` must be a live handle; each output pointer may be NULL.
 */
enum HftsStatus hfts_hierarchy_shape(const struct HftsHierarchy *hierarchy,
                                     size_t *nodes,
                                     size_t *observations,
                                     size_t *points);

/**
 * # Safety
 * `hierarchy` must come from `hfts_hierarchy_load` and not be used afterwards.
 */
void hfts_hierarchy_free(struct HftsHierarchy *hierarchy);

/**
 * Rolling one-step backtest with window `window`.
 *
 * # Safety
 * `hierarchy` must be a live handle and `out` writable.
 */
enum HftsStatus hfts_backtest(const struct HftsHierarchy *hierarchy,
                              size_t window,
                              uint32_t kind,
                              uint32_t forecast_method,
                              struct HftsReport **out);

/**
 * Number of levels in a report; 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
size_t hfts_report_level_count(const struct HftsReport *report);

/**
 * Label and mean MAFE of level `index`, counted from the bottom level up. The label
 * pointer is owned by the report.
 *
 * # Safety
 * `report` must be a live handle; `label` and `mafe` may be NULL.
 */
enum HftsStatus hfts_report_level(const struct HftsReport *report,
                                  size_t index,
                                  const char **label,
                                  double *mafe);

/**
 * MAFE and MAD of the integrated errors of node `id`.
 *
 * # Safety
 * `report` must be a live handle, `id` NUL-terminated; `mafe` and `mad` may be NULL.
 */
enum HftsStatus hfts_report_node(const struct HftsReport *report,
                                 const char *id,
                                 double *mafe,
                                 double *mad);

/**
 * # Safety
 * `report` must come from `hfts_backtest` and not be used afterwards.
 */
void hfts_report_free(struct HftsReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HFTS_H */
