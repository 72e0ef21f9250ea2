#ifndef LPFLOW_H
#define LPFLOW_H

/* Generated by cbindgen from the lpflow-ffi sources; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum LpflowStatus {
  LPFLOW_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LPFLOW_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or inconsistent with the grid.
   */
  LPFLOW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The configuration text was rejected.
   */
  LPFLOW_STATUS_CONFIG = 3,
  /**
   * The time step exceeds the CFL limit of the current state.
   */
  LPFLOW_STATUS_CFL = 4,
  /**
   * The state stopped being finite; the last finite state is kept.
   */
  LPFLOW_STATUS_BLOWUP = 5,
  /**
   * A file could not be read or written.
   */
  LPFLOW_STATUS_IO = 6,
  /**
   * A checkpoint file is corrupt or from another version.
   */
  LPFLOW_STATUS_CHECKPOINT = 7,
  /**
   * An internal error; the handle involved should be freed.
   */
  LPFLOW_STATUS_PANIC = 8,
} LpflowStatus;

/**
 * A grid with its dyadic partition.
 */
typedef struct LpflowGrid LpflowGrid;

/**
 * A running simulation and the samples it has recorded.
 */
typedef struct LpflowSimulation LpflowSimulation;

/**
 * Criterion quantities of one state. Stress entries are zero for MHD runs,
 * `h_bmo` is zero for Oldroyd-B runs.
 */
typedef struct LpflowSample {
  double t;
  double tau_sup;
  double tau_l2;
  double tau_l1;
  double tau_bmo;
  double tau_besov;
  double v_holder;
  double tau_holder;
  double grad_v_sup;
  double v_l2;
  double energy;
  double dissipation;
  double conf_min_eig;
  double conf_min_det;
  double h_bmo;
} LpflowSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the calling thread's last failure, or null if none. The
 * string stays valid until the next failing call on this thread.
 */
const char *lpflow_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lpflow_version(void);

/**
 * Creates an `n x n` grid on the square of side `length`. `n` must be a
 * power of two, at least 16.
 *
 * # Safety
 * `out` is null or valid for writes of a pointer.
 */
enum LpflowStatus lpflow_grid_new(size_t n, double length, struct LpflowGrid **out);

/**
 * # Safety
 * `grid` is null or a live handle from [`lpflow_grid_new`].
 */
void lpflow_grid_free(struct LpflowGrid *grid);

/**
 * Points per side, and the first and last dyadic block index.
 *
 * # Safety
 * `grid` is a live handle; each out-pointer is writable.
 */
enum LpflowStatus lpflow_grid_info(const struct LpflowGrid *grid,
                                   size_t *n,
                                   int32_t *q_min,
                                   int32_t *q_max);

/**
 * `‖Δ_q f‖_∞` for `q = q_min..=q_max` into `out`, which holds exactly
 * `q_max - q_min + 1` doubles.
 *
 * # Safety
 * `grid` is a live handle; `values` is readable for `len` doubles and
 * `out` writable for `out_len` doubles.
 */
enum LpflowStatus lpflow_block_sup_norms(const struct LpflowGrid *grid,
                                         const double *values,
                                         size_t len,
                                         double *out,
                                         size_t out_len);

/**
 * Hölder seminorm `sup_q 2^{qα} ‖Δ_q f‖_∞` for `α` in `(0, 1) ∪ (1, 2)`.
 *
 * # Safety
 * `grid` is a live handle; `values` is readable for `len` doubles and
 * `out` writable.
 */
enum LpflowStatus lpflow_holder_norm(const struct LpflowGrid *grid,
                                     const double *values,
                                     size_t len,
                                     double alpha,
                                     double *out);

/**
 * `sup_q ‖Δ_q f‖_∞`.
 *
 * # Safety
 * `grid` is a live handle; `values` is readable for `len` doubles and
 * `out` writable.
 */
enum LpflowStatus lpflow_besov_norm(const struct LpflowGrid *grid,
                                    const double *values,
                                    size_t len,
                                    double *out);

/**
 * Dyadic BMO seminorm of the field's trigonometric interpolant.
 *
 * # Safety
 * `grid` is a live handle; `values` is readable for `len` doubles and
 * `out` writable.
 */
enum LpflowStatus lpflow_bmo_norm(const struct LpflowGrid *grid,
                                  const double *values,
                                  size_t len,
                                  double *out);

/**
 * Creates a simulation from TOML configuration text, at its initial data.
 *
 * # Safety
 * `config` is a NUL-terminated string; `out` is writable.
 */
enum LpflowStatus lpflow_simulation_new(const char *config, struct LpflowSimulation **out);

/**
 * Reopens a checkpoint written by [`lpflow_simulation_save`] or by a batch
 * run, with its recorded samples.
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is writable.
 */
enum LpflowStatus lpflow_simulation_load(const char *path, struct LpflowSimulation **out);

/**
 * # Safety
 * `sim` is null or a live simulation handle.
 */
void lpflow_simulation_free(struct LpflowSimulation *sim);

/**
 * Advances `steps` steps. On failure the state is the last one reached.
 *
 * # Safety
 * `sim` is a live simulation handle.
 */
enum LpflowStatus lpflow_simulation_step(struct LpflowSimulation *sim, uint64_t steps);

/**
 * Current time and step count.
 *
 * # Safety
 * `sim` is a live simulation handle; `t` and `step` are writable.
 */
enum LpflowStatus lpflow_simulation_time(const struct LpflowSimulation *sim,
                                         double *t,
                                         uint64_t *step);

/**
 * Samples the criterion quantities of the current state and appends them
 * to the history saved with checkpoints.
 *
 * # Safety
 * `sim` is a live simulation handle; `out` is writable.
 */
enum LpflowStatus lpflow_simulation_sample(struct LpflowSimulation *sim, struct LpflowSample *out);

/**
 * Copies the velocity components into `vx` and `vy`, each `len = n * n`
 * doubles.
 *
 * # Safety
 * `sim` is a live simulation handle; `vx` and `vy` are writable for `len`
 * doubles.
 */
enum LpflowStatus lpflow_simulation_velocity(const struct LpflowSimulation *sim,
                                             double *vx,
                                             double *vy,
                                             size_t len);

/**
 * Writes a checkpoint of the current state and recorded samples to `path`.
 *
 * # Safety
 * `sim` is a live simulation handle; `path` is a NUL-terminated string.
 */
enum LpflowStatus lpflow_simulation_save(const struct LpflowSimulation *sim, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPFLOW_H */
