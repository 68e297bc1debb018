//! C ABI over the teleportation-under-noise simulator.
//!
//! Conventions: every function returns a [`TsStatus`] code and writes its
//! results through out-pointers; states are opaque handles created and
//! released by this library; no call unwinds across the boundary. Pointer
//! contracts are uniform: out-pointers must be valid for a single write,
//! state handles must come from this library and not be used after free.

#![allow(clippy::missing_safety_doc)]

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use telesim::analysis;
use telesim::channels::{self, ChannelKind, ChannelSpec};
use telesim::closed_forms::{self, ScenarioId};
use telesim::linalg::DensityMatrix;
use telesim::teleport::{
    average_fidelity, teleport_two, RecoveryKind, RecoverySpec, TwoQubitInput,
};

/// Status code returned by every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    /// A parameter was out of range, non-finite, or an unknown enum value.
    InvalidArgument = 1,
    /// The computation failed (no closed form, no bracket, integration
    /// failure, or an internal panic).
    SolverFailure = 2,
    /// A required pointer was null.
    NullPointer = 3,
}

/// Transmission-noise channel selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsChannel {
    Ideal = 0,
    Dephasing = 1,
    BitFlip = 2,
    Combined = 3,
}

impl TsChannel {
    fn to_kind(self) -> ChannelKind {
        match self {
            TsChannel::Ideal => ChannelKind::Ideal,
            TsChannel::Dephasing => ChannelKind::Dephasing,
            TsChannel::BitFlip => ChannelKind::BitFlip,
            TsChannel::Combined => ChannelKind::Combined,
        }
    }
}

/// Recovery regime selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsRecovery {
    Perfect = 0,
    Dephasing = 1,
    BitFlip = 2,
    BitPhaseFlip = 3,
    Intrinsic = 4,
}

impl TsRecovery {
    fn to_kind(self) -> RecoveryKind {
        match self {
            TsRecovery::Perfect => RecoveryKind::Perfect,
            TsRecovery::Dephasing => RecoveryKind::Dephasing,
            TsRecovery::BitFlip => RecoveryKind::BitFlip,
            TsRecovery::BitPhaseFlip => RecoveryKind::BitPhaseFlip,
            TsRecovery::Intrinsic => RecoveryKind::Intrinsic,
        }
    }
}

/// Opaque density-matrix handle.
pub struct TsState {
    inner: DensityMatrix,
}

fn guarded(body: impl FnOnce() -> TsStatus) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => TsStatus::SolverFailure,
    }
}

fn recovery_spec(alpha: TsRecovery, omega0: f64, gamma: f64, t: f64) -> Option<RecoverySpec> {
    match alpha {
        TsRecovery::Perfect => Some(RecoverySpec::perfect()),
        other => RecoverySpec::noisy(other.to_kind(), omega0, gamma, t).ok(),
    }
}

/// Library version as a NUL-terminated static string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build the shared channel state for the given transmission noise. The
/// returned handle must be released with `ts_state_free`.
#[no_mangle]
pub unsafe extern "C" fn ts_channel_state(
    channel: TsChannel,
    gamma: f64,
    t0: f64,
    out: *mut *mut TsState,
) -> TsStatus {
    if out.is_null() {
        return TsStatus::NullPointer;
    }
    guarded(|| {
        let Ok(spec) = ChannelSpec::new(channel.to_kind(), gamma, t0) else {
            return TsStatus::InvalidArgument;
        };
        match channels::channel_state(&spec) {
            Ok(state) => {
                *out = Box::into_raw(Box::new(TsState { inner: state }));
                TsStatus::Ok
            }
            Err(_) => TsStatus::SolverFailure,
        }
    })
}

/// Matrix dimension of a state handle.
#[no_mangle]
pub unsafe extern "C" fn ts_state_dim(state: *const TsState, out: *mut usize) -> TsStatus {
    if state.is_null() || out.is_null() {
        return TsStatus::NullPointer;
    }
    *out = (*state).inner.dim();
    TsStatus::Ok
}

/// One matrix entry of a state handle.
#[no_mangle]
pub unsafe extern "C" fn ts_state_entry(
    state: *const TsState,
    row: usize,
    col: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TsStatus {
    if state.is_null() || out_re.is_null() || out_im.is_null() {
        return TsStatus::NullPointer;
    }
    let dim = (*state).inner.dim();
    if row >= dim || col >= dim {
        return TsStatus::InvalidArgument;
    }
    let z = (*state).inner.matrix().get(row, col);
    *out_re = z.re;
    *out_im = z.im;
    TsStatus::Ok
}

/// Negativity of a two-qubit state handle.
#[no_mangle]
pub unsafe extern "C" fn ts_state_negativity(state: *const TsState, out: *mut f64) -> TsStatus {
    if state.is_null() || out.is_null() {
        return TsStatus::NullPointer;
    }
    guarded(|| match analysis::negativity(&(*state).inner, 0) {
        Ok(n) => {
            *out = n;
            TsStatus::Ok
        }
        Err(_) => TsStatus::InvalidArgument,
    })
}

/// Release a state handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ts_state_free(state: *mut TsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Bloch-averaged teleportation fidelity for one scenario: channel built by
/// `channel` noise at rate `gamma` for time `t0`, recovery of kind `alpha`
/// rotating at `omega0` under the same rate for readout time `t`.
#[no_mangle]
pub unsafe extern "C" fn ts_average_fidelity(
    channel: TsChannel,
    gamma: f64,
    t0: f64,
    alpha: TsRecovery,
    omega0: f64,
    t: f64,
    out: *mut f64,
) -> TsStatus {
    if out.is_null() {
        return TsStatus::NullPointer;
    }
    guarded(|| {
        let Ok(spec) = ChannelSpec::new(channel.to_kind(), gamma, t0) else {
            return TsStatus::InvalidArgument;
        };
        let Some(rec) = recovery_spec(alpha, omega0, gamma, t) else {
            return TsStatus::InvalidArgument;
        };
        match average_fidelity(&spec, &rec) {
            Ok(f) => {
                *out = f;
                TsStatus::Ok
            }
            Err(_) => TsStatus::SolverFailure,
        }
    })
}

/// The printed closed-form average fidelity for the scenario, when one
/// exists (SolverFailure otherwise).
#[no_mangle]
pub unsafe extern "C" fn ts_fav_closed(
    channel: TsChannel,
    alpha: TsRecovery,
    gamma: f64,
    omega0: f64,
    t: f64,
    t0: f64,
    out: *mut f64,
) -> TsStatus {
    if out.is_null() {
        return TsStatus::NullPointer;
    }
    guarded(|| {
        let scenario = ScenarioId::single(channel.to_kind(), alpha.to_kind(), gamma, omega0, t, t0);
        match closed_forms::fav_closed(&scenario) {
            Ok(f) => {
                *out = f;
                TsStatus::Ok
            }
            Err(_) => TsStatus::SolverFailure,
        }
    })
}

/// Closed-form channel negativity.
#[no_mangle]
pub unsafe extern "C" fn ts_channel_negativity_closed(
    channel: TsChannel,
    gamma: f64,
    t0: f64,
    out: *mut f64,
) -> TsStatus {
    if out.is_null() {
        return TsStatus::NullPointer;
    }
    let Ok(spec) = ChannelSpec::new(channel.to_kind(), gamma, t0) else {
        return TsStatus::InvalidArgument;
    };
    *out = channels::channel_negativity_closed(&spec);
    TsStatus::Ok
}

/// Sudden-death time of the combined channel, -ln(sqrt(2)-1)/(2 gamma).
#[no_mangle]
pub unsafe extern "C" fn ts_tau_d(gamma: f64, out: *mut f64) -> TsStatus {
    if out.is_null() {
        return TsStatus::NullPointer;
    }
    match closed_forms::tau_d(gamma) {
        Ok(v) => {
            *out = v;
            TsStatus::Ok
        }
        Err(_) => TsStatus::InvalidArgument,
    }
}

/// Two-qubit output sudden-death time under combined channels and perfect
/// recovery, for input entanglement `eta`.
#[no_mangle]
pub unsafe extern "C" fn ts_tau_prime(eta: f64, gamma: f64, out: *mut f64) -> TsStatus {
    if out.is_null() {
        return TsStatus::NullPointer;
    }
    match closed_forms::tau_prime(eta, gamma) {
        Ok(v) => {
            *out = v;
            TsStatus::Ok
        }
        Err(_) => TsStatus::InvalidArgument,
    }
}

/// Critical recovery frequency over the dephased channel; writes the
/// frequency and the first-maximum fidelity reached there.
#[no_mangle]
pub unsafe extern "C" fn ts_critical_omega(
    alpha: TsRecovery,
    gamma: f64,
    t0: f64,
    out_omega_c: *mut f64,
    out_phi_max: *mut f64,
) -> TsStatus {
    if out_omega_c.is_null() || out_phi_max.is_null() {
        return TsStatus::NullPointer;
    }
    guarded(
        || match analysis::critical_omega(alpha.to_kind(), gamma, t0) {
            Ok(solved) => {
                *out_omega_c = solved.omega_c;
                *out_phi_max = solved.phi_max_at_omega_c;
                TsStatus::Ok
            }
            Err(_) => TsStatus::SolverFailure,
        },
    )
}

/// Run one two-qubit branch end to end and report fidelity and negativity
/// of the output state.
#[no_mangle]
pub unsafe extern "C" fn ts_teleport_two(
    channel: TsChannel,
    gamma: f64,
    t0: f64,
    alpha: TsRecovery,
    omega0: f64,
    t: f64,
    theta: f64,
    j1: usize,
    j2: usize,
    out_fidelity: *mut f64,
    out_negativity: *mut f64,
) -> TsStatus {
    if out_fidelity.is_null() || out_negativity.is_null() {
        return TsStatus::NullPointer;
    }
    guarded(|| {
        let Ok(spec) = ChannelSpec::new(channel.to_kind(), gamma, t0) else {
            return TsStatus::InvalidArgument;
        };
        let Ok(psi) = TwoQubitInput::new(theta) else {
            return TsStatus::InvalidArgument;
        };
        let Some(rec) = recovery_spec(alpha, omega0, gamma, t) else {
            return TsStatus::InvalidArgument;
        };
        if j1 > 3 || j2 > 3 {
            return TsStatus::InvalidArgument;
        }
        match teleport_two(&psi, &spec, &rec, (j1, j2)) {
            Ok(branch) => {
                *out_fidelity = branch.fidelity;
                *out_negativity = branch.negativity;
                TsStatus::Ok
            }
            Err(_) => TsStatus::SolverFailure,
        }
    })
}
