#ifndef PAIRSEP_H
#define PAIRSEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_MISSING_POLARIZATION = 3,
  PS_STATUS_OUT_OF_RANGE = 4,
  PS_STATUS_NUMERICAL = 5,
  PS_STATUS_PANIC = 6,
} PsStatus;

typedef enum PsPolarization {
  PS_POLARIZATION_TE = 0,
  PS_POLARIZATION_TM = 1,
} PsPolarization;

/**
 * Opaque coupler handle.
 */
typedef struct PsCoupler PsCoupler;

/**
 * Opaque two-photon state handle.
 */
typedef struct PsState PsState;

/**
 * Dimensionless coupler parameters. `period_t_lambda` is NaN when M = 0.
 */
typedef struct PsDimensionless {
  double delta_xi;
  double big_m;
  double period_t_lambda;
  double eta_deg;
} PsDimensionless;

/**
 * Outcome probabilities. Undefined visibilities are NaN.
 */
typedef struct PsOutcome {
  double r_aa;
  double r_ab;
  double r_ba;
  double r_bb;
  double ps_total;
  double ps_classical;
  double ps_interference;
  double pb_total;
  double pb_classical;
  double pb_interference;
  double vis_s;
  double vis_b;
} PsOutcome;

/**
 * Closed-form narrowband prediction. Undefined visibilities are NaN.
 */
typedef struct PsNarrowband {
  double ps_total;
  double ps_classical;
  double ps_interference;
  double vis_s;
  double vis_b;
} PsNarrowband;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Unit-length coupler with κ(λdeg) = π/4 + `delta_xi` and
 * λdeg·dκ/dλ = `big_m`.
 *
 * # Safety
 * `out_coupler` must be a valid pointer to writable storage for one handle pointer.
 */
enum PsStatus ps_coupler_from_dimensionless(double delta_xi,
                                            double big_m,
                                            double lambda_deg,
                                            struct PsCoupler **out_coupler);

/**
 * Polarization-independent coupler with κ(λ) = slope·λ + intercept (1/m).
 *
 * # Safety
 * `out_coupler` must be a valid pointer to writable storage for one handle pointer.
 */
enum PsStatus ps_coupler_linear(double length,
                                double slope,
                                double intercept,
                                struct PsCoupler **out_coupler);

/**
 * Releases a coupler. Null is ignored.
 *
 * # Safety
 * `coupler` must come from a `ps_coupler_*` constructor and not be freed twice.
 */
void ps_coupler_free(struct PsCoupler *coupler);

/**
 * # Safety
 * Pointers must be valid; `coupler` must be a live handle.
 */
enum PsStatus ps_coupler_dimensionless_params(const struct PsCoupler *coupler,
                                              enum PsPolarization polarization,
                                              double lambda_deg,
                                              struct PsDimensionless *out_params);

/**
 * Cross-coupled power fraction η(λ).
 *
 * # Safety
 * Pointers must be valid; `coupler` must be a live handle.
 */
enum PsStatus ps_coupler_splitting_ratio(const struct PsCoupler *coupler,
                                         enum PsPolarization polarization,
                                         double lambda,
                                         double *out_eta);

/**
 * Co-polarized (Type-I) pair state from two Gaussian photon spectra and an
 * energy-conserving Gaussian pump. `pump_fwhm` = 0 selects a flat pump.
 *
 * # Safety
 * `out_state` must be a valid pointer to writable storage for one handle pointer.
 */
enum PsStatus ps_state_type1(double photon1_center,
                             double photon1_fwhm,
                             double photon2_center,
                             double photon2_fwhm,
                             double pump_fwhm,
                             enum PsPolarization polarization,
                             size_t points_per_axis,
                             double sigma_span,
                             struct PsState **out_state);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must come from a `ps_state_*` constructor and not be freed twice.
 */
void ps_state_free(struct PsState *state);

/**
 * # Safety
 * Pointers must be valid; `state` must be a live handle.
 */
enum PsStatus ps_state_schmidt_number(const struct PsState *state, double *out_sn);

/**
 * Both sources emit `state`; source B carries the relative pump phase
 * `theta` (rad) and delay `tau` (s).
 *
 * # Safety
 * Pointers must be valid; handles must be live.
 */
enum PsStatus ps_outcome(const struct PsState *state,
                         const struct PsCoupler *coupler,
                         double theta,
                         double tau,
                         struct PsOutcome *out_outcome);

/**
 * Closed-form narrowband prediction at (Δξ, MΛ, θ).
 *
 * # Safety
 * `out_prediction` must be a valid pointer.
 */
enum PsStatus ps_narrowband_oracle(double delta_xi,
                                   double m_lambda,
                                   double theta,
                                   struct PsNarrowband *out_prediction);

/**
 * Message of the last failing call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ps_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ps_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAIRSEP_H */
