#ifndef BETAKDE_H
#define BETAKDE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BkdeStatus {
  BKDE_STATUS_OK = 0,
  BKDE_STATUS_NULL_POINTER = 1,
  BKDE_STATUS_INVALID_ARGUMENT = 2,
  BKDE_STATUS_DOMAIN = 3,
  BKDE_STATUS_DEGENERATE_SAMPLE = 4,
  BKDE_STATUS_INSUFFICIENT_DATA = 5,
  BKDE_STATUS_NUMERICAL = 6,
  BKDE_STATUS_DIVERGENCE = 7,
  BKDE_STATUS_OPTIMIZATION = 8,
  BKDE_STATUS_PANIC = 9,
  BKDE_STATUS_INTERNAL = 10,
} BkdeStatus;

typedef enum BkdeKurtosisMode {
  BKDE_KURTOSIS_MODE_STANDARD = 0,
  BKDE_KURTOSIS_MODE_SUM_SQUARED = 1,
} BkdeKurtosisMode;

typedef enum BkdeFamily {
  /**
   * Beta kernel with shapes (x/h + 1, (1 - x)/h + 1).
   */
  BKDE_FAMILY_BETA_F1 = 0,
  /**
   * Boundary-corrected beta kernel; requires h < 0.25.
   */
  BKDE_FAMILY_BETA_F2 = 1,
  /**
   * Gaussian kernel on the logit scale, data clipped to [1e-6, 1 - 1e-6].
   */
  BKDE_FAMILY_GAUSS_LOGIT = 2,
  /**
   * Gaussian kernel with reflection at both ends.
   */
  BKDE_FAMILY_GAUSS_REFLECT = 3,
} BkdeFamily;

/**
 * Opaque fitted density.
 */
typedef struct BkdeModel BkdeModel;

/**
 * A selected bandwidth. Fields that do not apply are NaN.
 */
typedef struct BkdeSelection {
  double h;
  /**
   * 1 when the moment fit was infeasible and the heuristic was used.
   */
  int32_t used_fallback;
  double a_hat;
  double b_hat;
  double scaling_constant;
} BkdeSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Reference-rule bandwidth for `n` observations in [0, 1].
 *
 * # Safety
 * `data` must point to `n` readable doubles and `out` must be writable.
 */
enum BkdeStatus bkde_select_bandwidth(const double *data,
                                      size_t n,
                                      enum BkdeKurtosisMode mode,
                                      struct BkdeSelection *out);

/**
 * Closed-form reference bandwidth for Beta(a, b); needs a, b > 1.5.
 *
 * # Safety
 * `out` must be writable.
 */
enum BkdeStatus bkde_h_ref(double a, double b, size_t n, double *out);

/**
 * Fits a density with a fixed bandwidth.
 *
 * # Safety
 * `data` must point to `n` readable doubles and `out` must be writable.
 * The model written to `*out` is owned by the caller.
 */
enum BkdeStatus bkde_model_new(enum BkdeFamily family,
                               const double *data,
                               size_t n,
                               double h,
                               struct BkdeModel **out);

/**
 * Fits the boundary-corrected beta estimator at the reference-rule bandwidth.
 * `selection` may be null.
 *
 * # Safety
 * As for `bkde_model_new`; `selection`, when not null, must be writable.
 */
enum BkdeStatus bkde_model_new_reference(const double *data,
                                         size_t n,
                                         enum BkdeKurtosisMode mode,
                                         struct BkdeModel **out,
                                         struct BkdeSelection *selection);

/**
 * # Safety
 * `model` must come from this library and `out` must be writable.
 */
enum BkdeStatus bkde_model_evaluate(const struct BkdeModel *model, double x, double *out);

/**
 * # Safety
 * `xs` must hold `len` readable doubles and `out` `len` writable ones.
 */
enum BkdeStatus bkde_model_evaluate_many(const struct BkdeModel *model,
                                         const double *xs,
                                         size_t len,
                                         double *out);

/**
 * Integral of the estimate over [0, 1].
 *
 * # Safety
 * `model` must come from this library and `out` must be writable.
 */
enum BkdeStatus bkde_model_total_mass(const struct BkdeModel *model, double *out);

/**
 * Rescales the model in place so it integrates to one.
 *
 * # Safety
 * `model` must come from this library.
 */
enum BkdeStatus bkde_model_normalize(struct BkdeModel *model);

/**
 * # Safety
 * `model` must come from this library and `out` must be writable.
 */
enum BkdeStatus bkde_model_bandwidth(const struct BkdeModel *model, double *out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void bkde_model_free(struct BkdeModel *model);

/**
 * Message for the last failure on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bkde_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *bkde_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BETAKDE_H */
