#ifndef CAPFLOW_H
#define CAPFLOW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first four match the command-line exit codes.
 */
typedef enum CapflowStatus {
  CAPFLOW_STATUS_OK = 0,
  /**
   * A verification check did not pass.
   */
  CAPFLOW_STATUS_CHECK_FAILED = 1,
  CAPFLOW_STATUS_NUMERICAL = 2,
  /**
   * Invalid configuration or argument outside its domain.
   */
  CAPFLOW_STATUS_CONFIG = 3,
  CAPFLOW_STATUS_NULL_POINTER = 4,
  CAPFLOW_STATUS_INVALID_UTF8 = 5,
  /**
   * Output buffer too small.
   */
  CAPFLOW_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  CAPFLOW_STATUS_INTERNAL = 7,
} CapflowStatus;

/**
 * A finished flow run.
 */
typedef struct CapflowRun CapflowRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *capflow_last_error(void);

/**
 * Library version as a static string.
 */
const char *capflow_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void capflow_string_free(char *s);

/**
 * Runs a flow described by a JSON config (the format read by
 * `capflow flow --config`). A run that stops on a numerical failure is
 * still returned, together with `Numerical`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum CapflowStatus capflow_run_flow(const char *config_json, struct CapflowRun **out);

/**
 * # Safety
 * `run` must come from [`capflow_run_flow`] and not have been freed.
 */
void capflow_run_free(struct CapflowRun *run);

/**
 * Number of trace rows, 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t capflow_run_row_count(const struct CapflowRun *run);

/**
 * Hypersurface dimension n; a row of quermassintegrals has n + 2 entries.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t capflow_run_dimension(const struct CapflowRun *run);

/**
 * Copies t and W_0..W_{n+1} of row `row` into `t` and `w` (length `len`).
 *
 * # Safety
 * `run` must be a live handle, `t` writable, `w` valid for `len` doubles.
 */
enum CapflowStatus capflow_run_row(const struct CapflowRun *run,
                                   size_t row,
                                   double *t,
                                   double *w,
                                   size_t len);

/**
 * Trace as CSV; free with [`capflow_string_free`].
 *
 * # Safety
 * `run` must be a live handle and `out` writable.
 */
enum CapflowStatus capflow_run_trace_csv(const struct CapflowRun *run, char **out);

/**
 * Run summary as JSON; free with [`capflow_string_free`].
 *
 * # Safety
 * `run` must be a live handle and `out` writable.
 */
enum CapflowStatus capflow_run_summary_json(const struct CapflowRun *run, char **out);

/**
 * W_{0,θ}..W_{n+1,θ} of the cap C_{θ,r} (r = INFINITY for the flat ball)
 * into `out`, which must hold n + 2 values.
 *
 * # Safety
 * `out` must be valid for `len` doubles.
 */
enum CapflowStatus capflow_cap_quermass(size_t n,
                                        double theta,
                                        double r,
                                        size_t n_beta,
                                        double *out,
                                        size_t len);

/**
 * Runs a verification suite. `config_json` may be NULL for defaults.
 * Writes the JSON report to `out` and returns `CheckFailed` if any check
 * did not pass.
 *
 * # Safety
 * `suite` must be a NUL-terminated string, `config_json` NULL or one, and
 * `out` writable.
 */
enum CapflowStatus capflow_verify(const char *suite, const char *config_json, char **out);

/**
 * F = (E_k / E_l)^{1/(k-l)} at `kappa` (length n, all positive).
 *
 * # Safety
 * `kappa` must be valid for `n` doubles and `out` writable.
 */
enum CapflowStatus capflow_curvature_function(const double *kappa,
                                              size_t n,
                                              size_t k,
                                              size_t l,
                                              double *out);

/**
 * Möbius map from the unit ball to the upper half-space; points have `dim`
 * coordinates, the last one along the pole e.
 *
 * # Safety
 * `x` and `out` must be valid for `dim` doubles.
 */
enum CapflowStatus capflow_ball_to_halfspace(const double *x, size_t dim, double *out);

/**
 * Inverse of [`capflow_ball_to_halfspace`].
 *
 * # Safety
 * `y` and `out` must be valid for `dim` doubles.
 */
enum CapflowStatus capflow_halfspace_to_ball(const double *y, size_t dim, double *out);

/**
 * Pointwise stretch of the inverse map at a half-space point.
 *
 * # Safety
 * `y` must be valid for `dim` doubles and `out` writable.
 */
enum CapflowStatus capflow_conformal_factor(const double *y, size_t dim, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAPFLOW_H */
