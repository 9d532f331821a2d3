#ifndef QUANTUM_BATTERY_H
#define QUANTUM_BATTERY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_NULL_POINTER = 1,
  QB_STATUS_INVALID_PARAMS = 2,
  QB_STATUS_INVALID_CONFIG = 3,
  QB_STATUS_GAMMA_OUT_OF_RANGE = 4,
  QB_STATUS_OUT_OF_BOUNDS = 5,
  QB_STATUS_NUMERICAL = 6,
  QB_STATUS_PANIC = 7,
} QbStatus;

/**
 * Opaque model parameters.
 */
typedef struct QbParams QbParams;

/**
 * Opaque integrated trajectory.
 */
typedef struct QbTrajectory QbTrajectory;

/**
 * Opaque result of the relation suite.
 */
typedef struct QbVerification QbVerification;

/**
 * Battery, charger and total capacities and the residual.
 */
typedef struct QbCapacityReport {
  double battery;
  double charger;
  double total;
  double residual;
} QbCapacityReport;

/**
 * The six resource measures.
 */
typedef struct QbResourceReport {
  double concurrence;
  double steering;
  double bell;
  double coherence_l1;
  double imaginarity_l1;
  double texture_tr;
} QbResourceReport;

/**
 * One relation verdict; `name` is owned by the verification handle.
 */
typedef struct QbVerdict {
  const char *name;
  size_t samples;
  double max_residual;
  double tolerance;
  bool pass;
} QbVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never NULL.
 */
const char *qb_status_message(enum QbStatus status);

/**
 * Message of the last failure on this thread, or NULL if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *qb_last_error_message(void);

/**
 * Validates and boxes the four model constants.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QbStatus qb_params_new(double omega_b,
                            double omega_c,
                            double j1,
                            double j2,
                            struct QbParams **out);

/**
 * # Safety
 * `params` must be NULL or a handle from [`qb_params_new`] not yet freed.
 */
void qb_params_free(struct QbParams *params);

/**
 * Closed-form capacities at time `t`.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for writing.
 */
enum QbStatus qb_capacity_report(const struct QbParams *params,
                                 double t,
                                 struct QbCapacityReport *out);

/**
 * Resource measures of the evolved state, dephased when `gamma >= 0`.
 *
 * Pass a negative `gamma` for the noiseless state.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for writing.
 */
enum QbStatus qb_resources(const struct QbParams *params,
                           double t,
                           double gamma,
                           struct QbResourceReport *out);

/**
 * Integrates from `|01⟩` and stores `steps` samples on `[0, t_max]`.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for writing one pointer.
 */
enum QbStatus qb_trajectory_integrate(const struct QbParams *params,
                                      double t_max,
                                      size_t steps,
                                      struct QbTrajectory **out);

/**
 * Number of samples, 0 for NULL.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t qb_trajectory_len(const struct QbTrajectory *traj);

/**
 * Time and spectral battery capacity of sample `index`.
 *
 * # Safety
 * `traj` must be a live handle; `t_out` and `capacity_out` valid for writing.
 */
enum QbStatus qb_trajectory_sample(const struct QbTrajectory *traj,
                                   size_t index,
                                   double *t_out,
                                   double *capacity_out);

/**
 * # Safety
 * `traj` must be NULL or a handle from [`qb_trajectory_integrate`] not yet freed.
 */
void qb_trajectory_free(struct QbTrajectory *traj);

/**
 * Runs every relation on the default grid with the given seed.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QbStatus qb_verify_all(uint64_t seed, struct QbVerification **out);

/**
 * Number of verdicts, 0 for NULL.
 *
 * # Safety
 * `v` must be NULL or a live handle.
 */
size_t qb_verification_len(const struct QbVerification *v);

/**
 * Verdict `index`.
 *
 * # Safety
 * `v` must be a live handle; `out` valid for writing.
 */
enum QbStatus qb_verification_get(const struct QbVerification *v,
                                  size_t index,
                                  struct QbVerdict *out);

/**
 * Whether every verdict passed; false for NULL.
 *
 * # Safety
 * `v` must be NULL or a live handle.
 */
bool qb_verification_all_pass(const struct QbVerification *v);

/**
 * # Safety
 * `v` must be NULL or a handle from [`qb_verify_all`] not yet freed.
 */
void qb_verification_free(struct QbVerification *v);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUANTUM_BATTERY_H */
