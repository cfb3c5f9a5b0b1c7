#ifndef FREEJACOBI_H
#define FREEJACOBI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum FjStatus {
  FJ_STATUS_OK = 0,
  FJ_STATUS_NULL_POINTER = 1,
  FJ_STATUS_INVALID_ARGUMENT = 2,
  FJ_STATUS_SIZE_GUARD = 3,
  FJ_STATUS_NUMERICAL = 4,
  FJ_STATUS_BUFFER_TOO_SMALL = 5,
  FJ_STATUS_CONFIG = 6,
  FJ_STATUS_IO = 7,
  /**
   * A check of the run failed (see [`fj_run_config_file`]).
   */
  FJ_STATUS_VERIFICATION_FAILED = 8,
  FJ_STATUS_PANIC = 9,
} FjStatus;

/**
 * Integrated moments `m_0..m_{n_max}` of the free Jacobi process on a uniform grid.
 */
typedef struct FjMoments FjMoments;

/**
 * Monte Carlo estimates from a finished simulation.
 */
typedef struct FjSimulation FjSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fj_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fj_version(void);

/**
 * Integrate the moment system with `τ(Q) = theta`, `τ(P) = lambda·theta` and
 * `m_n(0) = 1` up to `t_end` with grid spacing at most `dt`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum FjStatus fj_moments_integrate(double lambda,
                                   double theta,
                                   size_t n_max,
                                   double t_end,
                                   double dt,
                                   struct FjMoments **out);

/**
 * # Safety
 * `h` must come from [`fj_moments_integrate`] and not be used afterwards; null is ignored.
 */
void fj_moments_free(struct FjMoments *h);

/**
 * Number of grid times and highest order held by the handle.
 *
 * # Safety
 * `h` must be a live handle; `times` and `n_max` valid writable pointers.
 */
enum FjStatus fj_moments_shape(const struct FjMoments *h, size_t *times, size_t *n_max);

/**
 * Copy the time grid into `buf` (length `len`).
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `len` writes.
 */
enum FjStatus fj_moments_times(const struct FjMoments *h, double *buf, size_t len);

/**
 * Copy `m_0..m_{n_max}` at grid index `index` into `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `len` writes.
 */
enum FjStatus fj_moments_row(const struct FjMoments *h, size_t index, double *buf, size_t len);

/**
 * Stationary moments `m_0(∞)..m_{n_max}(∞)` for `k` averaged unitaries, rounded to double.
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum FjStatus fj_stationary_moments(uint32_t k, size_t n_max, double *buf, size_t len);

/**
 * Density and distribution function of the stationary law at `x`.
 *
 * # Safety
 * `density` and `cdf` must be valid writable pointers.
 */
enum FjStatus fj_stationary_law(uint32_t k, double x, double *density, double *cdf);

/**
 * Free cumulants `κ_1..κ_{n_max}` of a projection of trace `num/den`, rounded to double.
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum FjStatus fj_projection_cumulants(int64_t num,
                                      int64_t den,
                                      size_t n_max,
                                      double *buf,
                                      size_t len);

/**
 * Check every exact identity of the word expansion up to `n_max`; writes the
 * number of identities checked and the number that failed.
 *
 * # Safety
 * `checked` and `failed` must be valid writable pointers.
 */
enum FjStatus fj_expansion_verify(size_t n_max, size_t *checked, size_t *failed);

/**
 * Simulate `k` unitary Brownian motions on `U(n)` and record `W/k²` moments
 * up to `n_max` at `snapshots` equally spaced times.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum FjStatus fj_simulate_w(size_t n,
                            uint32_t k,
                            double t_end,
                            double dt,
                            size_t trajectories,
                            uint64_t seed,
                            size_t n_max,
                            size_t snapshots,
                            struct FjSimulation **out);

/**
 * # Safety
 * `h` must come from [`fj_simulate_w`] and not be used afterwards; null is ignored.
 */
void fj_simulation_free(struct FjSimulation *h);

/**
 * Number of recorded times.
 *
 * # Safety
 * `h` must be a live handle and `count` a valid writable pointer.
 */
enum FjStatus fj_simulation_snapshots(const struct FjSimulation *h, size_t *count);

/**
 * Time, mean and standard error of `Re tr(U)/N` at snapshot `index`.
 *
 * # Safety
 * `h` must be a live handle; the out pointers valid and writable.
 */
enum FjStatus fj_simulation_trace_u(const struct FjSimulation *h,
                                    size_t index,
                                    double *t,
                                    double *mean,
                                    double *se);

/**
 * Mean and standard error of `tr((W/k²)^order)/N` at snapshot `index`.
 *
 * # Safety
 * `h` must be a live handle; the out pointers valid and writable.
 */
enum FjStatus fj_simulation_w_moment(const struct FjSimulation *h,
                                     size_t index,
                                     size_t order,
                                     double *mean,
                                     double *se);

/**
 * Run a pipeline described by a TOML config file (same format as the
 * command-line tool) into `out_dir` (null: the file's `out` key or the
 * default). Returns `FJ_STATUS_VERIFICATION_FAILED` when a check fails; the
 * artifacts and manifest are written either way.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_dir` null or NUL-terminated.
 */
enum FjStatus fj_run_config_file(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEJACOBI_H */
