#ifndef HARDY_FORGE_H
#define HARDY_FORGE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_INVALID_INPUT = 2,
  HF_STATUS_OUTSIDE_GRID = 3,
  HF_STATUS_NOT_NONNEGATIVE = 4,
  HF_STATUS_SINGULAR = 5,
  HF_STATUS_NO_CONVERGENCE = 6,
  HF_STATUS_INSUFFICIENT_DECAY = 7,
  HF_STATUS_CONFIG = 8,
  HF_STATUS_IO = 9,
  HF_STATUS_PANIC = 10,
} HfStatus;

/**
 * Optimal radial weight of `-Δ + V` computed on a log grid.
 */
typedef struct HfRadialWeight HfRadialWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *hf_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Free with `hf_string_free`.
 */
char *hf_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hf_string_free(char *s);

/**
 * `((n-2)/2)^2`.
 */
double hf_hardy_constant(size_t n);

/**
 * Builds the optimal radial weight for potential `spec` (`zero`, `constant:c`,
 * `power:c,b` or `csv:path`) on `points` log-spaced nodes in `[r_min, r_max]`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HfStatus hf_radial_weight_new(size_t n,
                                   const char *spec,
                                   double r_min,
                                   double r_max,
                                   size_t points,
                                   struct HfRadialWeight **out);

/**
 * # Safety
 * `h` must come from `hf_radial_weight_new` and not have been freed. NULL is ignored.
 */
void hf_radial_weight_free(struct HfRadialWeight *h);

/**
 * Number of grid nodes, 0 for NULL.
 *
 * # Safety
 * `h` must be a live handle or NULL.
 */
size_t hf_radial_weight_len(const struct HfRadialWeight *h);

/**
 * `W(r)` by interpolation.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum HfStatus hf_radial_weight_eval(const struct HfRadialWeight *h, double r, double *out);

/**
 * Copies nodes and `W` values into caller buffers of length `len`, which must
 * equal `hf_radial_weight_len`.
 *
 * # Safety
 * `r` and `w` must each point to `len` writable doubles.
 */
enum HfStatus hf_radial_weight_samples(const struct HfRadialWeight *h,
                                       double *r,
                                       double *w,
                                       size_t len);

/**
 * Largest relative disagreement between the two weight formulas on the grid.
 *
 * # Safety
 * `h` must be a live handle or NULL (returns NaN).
 */
double hf_radial_weight_consistency(const struct HfRadialWeight *h);

/**
 * Runs a battery from a config document and returns the JSON report in `out_json`
 * (free with `hf_string_free`). `subcommand` may be NULL when the document names it.
 * `*out_pass` is set to 1 if every check passed, else 0.
 *
 * # Safety
 * String arguments must be NUL-terminated; out pointers must be valid.
 */
enum HfStatus hf_run_battery(const char *config,
                             const char *subcommand,
                             int64_t seed,
                             char **out_json,
                             int32_t *out_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDY_FORGE_H */
