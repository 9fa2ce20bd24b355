#ifndef FORMCTL_H
#define FORMCTL_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FormctlStatus {
  FORMCTL_STATUS_OK = 0,
  FORMCTL_STATUS_NULL_POINTER = 1,
  FORMCTL_STATUS_INVALID_ARGUMENT = 2,
  FORMCTL_STATUS_INVALID_SPEC = 3,
  FORMCTL_STATUS_PARSE = 4,
  FORMCTL_STATUS_DOMAIN = 5,
  FORMCTL_STATUS_INTEGRATION = 6,
  FORMCTL_STATUS_IO = 7,
  /**
   * The requested value does not exist (e.g. no convergence time).
   */
  FORMCTL_STATUS_UNAVAILABLE = 8,
  FORMCTL_STATUS_PANIC = 9,
} FormctlStatus;

typedef enum FormctlVerdict {
  FORMCTL_VERDICT_CONVERGED_STRONG_CONGRUENT = 0,
  FORMCTL_VERDICT_CONVERGED_OTHER = 1,
  FORMCTL_VERDICT_NOT_CONVERGED = 2,
  FORMCTL_VERDICT_DIVERGED = 3,
} FormctlVerdict;

/**
 * Gain schedule handle.
 */
typedef struct FormctlGains FormctlGains;

/**
 * Finished simulation handle.
 */
typedef struct FormctlRun FormctlRun;

/**
 * Desired formation handle.
 */
typedef struct FormctlSpec FormctlSpec;

/**
 * Integrator settings for [`formctl_simulate`].
 */
typedef struct FormctlSimOptions {
  double h;
  double t_final;
  double eps;
  size_t sustain;
  bool override_collocated;
} FormctlSimOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next formctl call on the same thread.
 */
const char *formctl_last_error(void);

/**
 * Builds a formation from a scenario config JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FormctlStatus formctl_spec_from_json(const char *json, struct FormctlSpec **out);

/**
 * Builds a formation from desired coordinates. `attachments` holds
 * `2 * (n - 2)` 1-based labels `i, j` for agents 3..n; `xy` holds `2 * n`
 * coordinates.
 *
 * # Safety
 * Pointers must reference arrays of the stated lengths; `out` must be
 * writable.
 */
enum FormctlStatus formctl_spec_from_coordinates(size_t n,
                                                 const size_t *attachments,
                                                 const double *xy,
                                                 struct FormctlSpec **out);

/**
 * Number of agents, or 0 for a null handle.
 *
 * # Safety
 * `spec` must be null or a live handle.
 */
size_t formctl_spec_n(const struct FormctlSpec *spec);

/**
 * Desired signed areas, one per triangle, copied into `out` (capacity
 * `len`, at least `n - 2`).
 *
 * # Safety
 * `spec` must be a live handle; `out` must hold `len` doubles.
 */
enum FormctlStatus formctl_spec_areas(const struct FormctlSpec *spec, double *out, size_t len);

/**
 * # Safety
 * `spec` must be null or a handle not yet freed.
 */
void formctl_spec_free(struct FormctlSpec *spec);

/**
 * Gains clearing every triangle's bound by the relative `margin`.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FormctlStatus formctl_gains_recommended(const struct FormctlSpec *spec,
                                             double alpha,
                                             double margin,
                                             struct FormctlGains **out);

/**
 * The same `alpha` for every follower and `beta = ratio * alpha` for every
 * ordinary follower.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FormctlStatus formctl_gains_ratio(const struct FormctlSpec *spec,
                                       double alpha,
                                       double ratio,
                                       struct FormctlGains **out);

/**
 * `beta / alpha` of the 1-based `agent` (3..n).
 *
 * # Safety
 * `gains` must be a live handle; `out` must be writable.
 */
enum FormctlStatus formctl_gains_ratio_of(const struct FormctlGains *gains,
                                          size_t agent,
                                          double *out);

/**
 * # Safety
 * `gains` must be null or a handle not yet freed.
 */
void formctl_gains_free(struct FormctlGains *gains);

struct FormctlSimOptions formctl_sim_options_default(void);

/**
 * Simulates from `xy0` (`2 * n` coordinates). Only endpoints are kept.
 *
 * # Safety
 * Handles must be live; `xy0` must hold `len` doubles; `opts` and `out`
 * must be valid pointers.
 */
enum FormctlStatus formctl_simulate(const struct FormctlSpec *spec,
                                    const struct FormctlGains *gains,
                                    const double *xy0,
                                    size_t len,
                                    const struct FormctlSimOptions *opts,
                                    struct FormctlRun **out);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum FormctlStatus formctl_run_verdict(const struct FormctlRun *run, enum FormctlVerdict *out);

/**
 * Final positions as `2 * n` coordinates written into `out` (capacity
 * `len`).
 *
 * # Safety
 * `run` must be a live handle; `out` must hold `len` doubles.
 */
enum FormctlStatus formctl_run_final_positions(const struct FormctlRun *run,
                                               double *out,
                                               size_t len);

/**
 * Largest final distance and area errors.
 *
 * # Safety
 * `run` must be a live handle; outputs must be writable.
 */
enum FormctlStatus formctl_run_max_errors(const struct FormctlRun *run,
                                          double *max_abs_z,
                                          double *max_abs_s);

/**
 * Time at which the errors entered and then stayed below `eps`;
 * `FORMCTL_STATUS_UNAVAILABLE` if the run did not converge.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum FormctlStatus formctl_run_time_to_threshold(const struct FormctlRun *run, double *out);

/**
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void formctl_run_free(struct FormctlRun *run);

/**
 * Signed area of the ordered triangle; positive when counterclockwise.
 */
double formctl_signed_area(double xi, double yi, double xj, double yj, double xk, double yk);

/**
 * Gain-ratio bound for a non-isosceles triangle with base `d_ji` and legs
 * `d_kj`, `d_ki`. Writes the raw bound and the admissibility threshold
 * `max(bound, 2)`.
 *
 * # Safety
 * Outputs must be writable.
 */
enum FormctlStatus formctl_gamma_lower_bound(double d_ji,
                                             double d_kj,
                                             double d_ki,
                                             double *gamma_bar,
                                             double *threshold);

/**
 * Whether `a x^4 + b x^3 + c x^2 + d x + e` has a real root.
 *
 * # Safety
 * `out` must be writable.
 */
enum FormctlStatus formctl_quartic_has_real_root(double a,
                                                 double b,
                                                 double c,
                                                 double d,
                                                 double e,
                                                 bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORMCTL_H */
