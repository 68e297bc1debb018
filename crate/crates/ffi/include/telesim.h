#ifndef TELESIM_H
#define TELESIM_H

/* Generated with cbindgen; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every API call.
 */
typedef enum {
  TS_STATUS_OK = 0,
  /**
   * A parameter was out of range, non-finite, or an unknown enum value.
   */
  TS_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The computation failed (no closed form, no bracket, integration
   * failure, or an internal panic).
   */
  TS_STATUS_SOLVER_FAILURE = 2,
  /**
   * A required pointer was null.
   */
  TS_STATUS_NULL_POINTER = 3,
} TsStatus;

/**
 * Transmission-noise channel selector.
 */
typedef enum {
  TS_CHANNEL_IDEAL = 0,
  TS_CHANNEL_DEPHASING = 1,
  TS_CHANNEL_BIT_FLIP = 2,
  TS_CHANNEL_COMBINED = 3,
} TsChannel;

/**
 * Recovery regime selector.
 */
typedef enum {
  TS_RECOVERY_PERFECT = 0,
  TS_RECOVERY_DEPHASING = 1,
  TS_RECOVERY_BIT_FLIP = 2,
  TS_RECOVERY_BIT_PHASE_FLIP = 3,
  TS_RECOVERY_INTRINSIC = 4,
} TsRecovery;

/**
 * Opaque density-matrix handle.
 */
typedef struct TsState TsState;

/**
 * Library version as a NUL-terminated static string.
 */
const char *ts_version(void);

/**
 * Build the shared channel state for the given transmission noise. The
 * returned handle must be released with `ts_state_free`.
 */
TsStatus ts_channel_state(TsChannel channel, double gamma, double t0, TsState **out);

/**
 * Matrix dimension of a state handle.
 */
TsStatus ts_state_dim(const TsState *state, uintptr_t *out);

/**
 * One matrix entry of a state handle.
 */
TsStatus ts_state_entry(const TsState *state,
                        uintptr_t row,
                        uintptr_t col,
                        double *out_re,
                        double *out_im);

/**
 * Negativity of a two-qubit state handle.
 */
TsStatus ts_state_negativity(const TsState *state, double *out);

/**
 * Release a state handle. Null is a no-op.
 */
void ts_state_free(TsState *state);

/**
 * Bloch-averaged teleportation fidelity for one scenario: channel built by
 * `channel` noise at rate `gamma` for time `t0`, recovery of kind `alpha`
 * rotating at `omega0` under the same rate for readout time `t`.
 */
TsStatus ts_average_fidelity(TsChannel channel,
                             double gamma,
                             double t0,
                             TsRecovery alpha,
                             double omega0,
                             double t,
                             double *out);

/**
 * The printed closed-form average fidelity for the scenario, when one
 * exists (SolverFailure otherwise).
 */
TsStatus ts_fav_closed(TsChannel channel,
                       TsRecovery alpha,
                       double gamma,
                       double omega0,
                       double t,
                       double t0,
                       double *out);

/**
 * Closed-form channel negativity.
 */
TsStatus ts_channel_negativity_closed(TsChannel channel, double gamma, double t0, double *out);

/**
 * Sudden-death time of the combined channel, -ln(sqrt(2)-1)/(2 gamma).
 */
TsStatus ts_tau_d(double gamma, double *out);

/**
 * Two-qubit output sudden-death time under combined channels and perfect
 * recovery, for input entanglement `eta`.
 */
TsStatus ts_tau_prime(double eta, double gamma, double *out);

/**
 * Critical recovery frequency over the dephased channel; writes the
 * frequency and the first-maximum fidelity reached there.
 */
TsStatus ts_critical_omega(TsRecovery alpha,
                           double gamma,
                           double t0,
                           double *out_omega_c,
                           double *out_phi_max);

/**
 * Run one two-qubit branch end to end and report fidelity and negativity
 * of the output state.
 */
TsStatus ts_teleport_two(TsChannel channel,
                         double gamma,
                         double t0,
                         TsRecovery alpha,
                         double omega0,
                         double t,
                         double theta,
                         uintptr_t j1,
                         uintptr_t j2,
                         double *out_fidelity,
                         double *out_negativity);

#endif  /* TELESIM_H */
