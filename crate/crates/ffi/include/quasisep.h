#ifndef QUASISEP_H
#define QUASISEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_POINTER = 1,
  /**
   * A string argument is not UTF-8, or an enum or size is out of range.
   */
  QS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Configuration text could not be parsed.
   */
  QS_STATUS_PARSE = 3,
  /**
   * A configuration value violates its constraint.
   */
  QS_STATUS_VALIDATION = 4,
  /**
   * A state field is invalid (e.g. nonpositive temperature).
   */
  QS_STATUS_INVALID_STATE = 5,
  /**
   * A time step failed even after halving dt.
   */
  QS_STATUS_STEP_FAILURE = 6,
  QS_STATUS_GRID_MISMATCH = 7,
  QS_STATUS_IO = 8,
  /**
   * The caller's buffer is shorter than required.
   */
  QS_STATUS_BUFFER_TOO_SMALL = 9,
  /**
   * An internal panic was caught at the boundary.
   */
  QS_STATUS_INTERNAL = 10,
} QsStatus;

/**
 * Fields that can be copied out of a simulation.
 */
typedef enum QsField {
  QS_FIELD_C = 0,
  QS_FIELD_THETA = 1,
  QS_FIELD_VX = 2,
  QS_FIELD_VY = 3,
  QS_FIELD_QX = 4,
  QS_FIELD_QY = 5,
  /**
   * Constitutive pressure `p(c)`.
   */
  QS_FIELD_PRESSURE = 6,
} QsField;

/**
 * Opaque simulation handle.
 */
typedef struct QsSim QsSim;

/**
 * Diagnostics of the current state. `entropy_production` is only meaningful
 * when `has_entropy_production` is nonzero, i.e. after at least one step.
 */
typedef struct QsDiagnostics {
  double t;
  double total_mass;
  double c_min;
  double c_max;
  double kinetic_energy;
  double internal_energy;
  double free_energy;
  double lyapunov;
  double entropy_production;
  uint8_t has_entropy_production;
  double constraint_residual;
  double assumption_violation_fraction;
} QsDiagnostics;

/**
 * Material parameters, field for field the same as the configuration keys
 * `material.*`.
 */
typedef struct QsMaterialParams {
  double rho10;
  double rho20;
  double gamma;
  double theta0;
  double kappa0;
  double delta;
  double m0;
  double nu1;
  double nu2;
  double sigma1;
  double sigma2;
  double heat_capacity;
  double p0;
} QsMaterialParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *qs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qs_version(void);

/**
 * Creates a simulation from configuration text (`key = value` lines).
 *
 * # Safety
 * `config_text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QsStatus qs_sim_new_from_config(const char *config_text, struct QsSim **out);

/**
 * Creates a simulation from a scenario preset with its default settings.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QsStatus qs_sim_new_from_scenario(const char *name, struct QsSim **out);

/**
 * Releases a simulation; null is ignored.
 *
 * # Safety
 * `sim` must come from `qs_sim_new_*` and not be used afterwards.
 */
void qs_sim_free(struct QsSim *sim);

/**
 * Advances by `n_steps` steps of the configured dt (each halved on failure
 * as needed). On failure the simulation keeps the last good state.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum QsStatus qs_sim_step(struct QsSim *sim, uint64_t n_steps);

/**
 * Advances to the configured end time with the solver's run loop (the last
 * step is shortened to land on `t_end`).
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum QsStatus qs_sim_run(struct QsSim *sim);

/**
 * Current simulated time.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum QsStatus qs_sim_time(const struct QsSim *sim, double *out);

/**
 * Number of steps taken so far.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum QsStatus qs_sim_step_count(const struct QsSim *sim, uint64_t *out);

/**
 * Grid shape; `ny` is 1 for one-dimensional grids. Fields are stored with
 * x varying fastest.
 *
 * # Safety
 * `sim` must be a live handle; `nx` and `ny` valid pointers.
 */
enum QsStatus qs_sim_grid_shape(const struct QsSim *sim, size_t *nx, size_t *ny);

/**
 * Number of cells, i.e. the buffer length `qs_sim_copy_field` needs.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum QsStatus qs_sim_cell_count(const struct QsSim *sim, size_t *out);

/**
 * Copies one field into `buf`, which must hold at least the cell count.
 * `field` is a [`QsField`] value; the y components of a one-dimensional grid
 * read as zero.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum QsStatus qs_sim_copy_field(const struct QsSim *sim, int32_t field, double *buf, size_t len);

/**
 * Diagnostics of the current state, with entropy production measured over
 * the latest step.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum QsStatus qs_sim_diagnostics(const struct QsSim *sim, struct QsDiagnostics *out);

/**
 * Material parameters the simulation was configured with.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum QsStatus qs_sim_material(const struct QsSim *sim, struct QsMaterialParams *out);

/**
 * Default material parameters.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QsStatus qs_material_default(struct QsMaterialParams *out);

/**
 * Mixture density `rho(c)`.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum QsStatus qs_density(double c, const struct QsMaterialParams *params, double *out);

/**
 * Minimizers of the double well at generalized temperature `u`, in
 * ascending order: one value above the critical temperature, two below.
 * `out` must hold two values; `count` receives how many were written.
 *
 * # Safety
 * `params` and `count` must be valid pointers and `out` valid for 2 writes.
 */
enum QsStatus qs_well_minima(double u,
                             const struct QsMaterialParams *params,
                             double *out,
                             size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASISEP_H */
