//! Every analytic expression printed in the source material, implemented as
//! an independent oracle layer. Nothing here touches the engine or the
//! protocol pipeline; the two sides meet only in tests and the acceptance
//! suite.
//!
//! Average fidelities (gamma is the common rate, t the readout time, t0 the
//! transmission time, e0 = exp(-2 gamma t0), w = sqrt(omega0^2 - gamma^2)):
//!
//! ```text
//! perfect over dephased/bit-flipped channel:  (2 + exp(-2 gamma t0))/3
//! perfect over combined channel:              2/3 + [(1+exp(-2 gamma t0))^2 - 2]/6
//! intrinsic over ideal:      [3 - exp(-2 gamma t) cos(omega0 t)]/4
//! dephasing over ideal:      [(8 + e_t) - e_t cos(omega0 t) - 2 e_h cos(w t)]/12
//! intrinsic over dephased:   [(7 + 2 e0) - (1 + 2 e0) e_t cos(omega0 t)]/12
//! dephasing over dephased:   [(7 + e0) + e0 e_t (1 - cos(omega0 t))
//!                              - (1 + e0) e_h cos(w t)
//!                              - (1 - e0)(gamma/w) e_h sin(w t)]/12
//! bit flip over dephased:    [(13 + 3 e0) + (1 + e0) e_t (1 - cos(omega0 t))
//!                              - (1 + 3 e0) e_h cos(w t)
//!                              + (1 - e0)(gamma/w) e_h sin(w t)]/24
//! ```
//!
//! with e_t = exp(-2 gamma t), e_h = exp(-gamma t). Bit flip over ideal
//! equals dephasing over ideal, and bit-phase flip over a dephased channel
//! equals bit flip over a dephased channel.

use crate::channels::ChannelKind;
use crate::error::{Error, Result};
use crate::teleport::RecoveryKind;

/// A scenario with (possibly) a printed formula: channel kind, recovery
/// kind, and whichever of gamma, omega0, readout time t, transmission time
/// t0 and two-qubit angle theta apply.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioId {
    pub channel: ChannelKind,
    pub alpha: RecoveryKind,
    pub gamma: f64,
    pub omega0: f64,
    pub t: f64,
    pub t0: f64,
    /// Two-qubit input angle; `None` selects the single-qubit scenarios.
    pub theta: Option<f64>,
}

impl ScenarioId {
    /// Single-qubit scenario with noisy recovery parameters.
    pub fn single(
        channel: ChannelKind,
        alpha: RecoveryKind,
        gamma: f64,
        omega0: f64,
        t: f64,
        t0: f64,
    ) -> Self {
        ScenarioId {
            channel,
            alpha,
            gamma,
            omega0,
            t,
            t0,
            theta: None,
        }
    }

    /// Channel-only scenario (perfect recovery); t0 is the transmission time.
    pub fn channel_only(channel: ChannelKind, gamma: f64, t0: f64) -> Self {
        ScenarioId {
            channel,
            alpha: RecoveryKind::Perfect,
            gamma,
            omega0: 0.0,
            t: 0.0,
            t0,
            theta: None,
        }
    }

    /// Two-qubit scenario under perfect recovery; t0 is the transmission time.
    pub fn two_qubit(channel: ChannelKind, theta: f64, gamma: f64, t0: f64) -> Self {
        ScenarioId {
            channel,
            alpha: RecoveryKind::Perfect,
            gamma,
            omega0: 0.0,
            t: 0.0,
            t0,
            theta: Some(theta),
        }
    }
}

/// `sqrt(omega0^2 - gamma^2)` guarded for the underdamped regime; at
/// omega0 == gamma the caller must take the analytic limit.
fn omega_shifted(omega0: f64, gamma: f64) -> Result<f64> {
    if omega0 < gamma * (1.0 - 1e-12) {
        return Err(Error::Overdamped { omega0, gamma });
    }
    Ok((omega0 * omega0 - gamma * gamma).max(0.0).sqrt())
}

/// sin(w t)/w with its removable limit t at w -> 0.
fn sinc_w(w: f64, t: f64) -> f64 {
    if (w * t).abs() < 1e-8 {
        t * (1.0 - (w * t) * (w * t) / 6.0)
    } else {
        (w * t).sin() / w
    }
}

fn e2(gamma: f64, t: f64) -> f64 {
    (-2.0 * gamma * t).exp()
}

/// The printed average-fidelity expression for the scenario, or
/// `NoClosedForm` when none exists.
pub fn fav_closed(s: &ScenarioId) -> Result<f64> {
    if s.theta.is_some() {
        return Err(Error::NoClosedForm(
            "two-qubit scenarios use fidelity_two_closed".into(),
        ));
    }
    let g = s.gamma;
    let e0 = e2(g, s.t0);
    let et = e2(g, s.t);
    let eh = (-g * s.t).exp();
    match (s.channel, s.alpha) {
        (ChannelKind::Ideal, RecoveryKind::Perfect) => Ok(1.0),
        (ChannelKind::Dephasing | ChannelKind::BitFlip, RecoveryKind::Perfect) => {
            Ok((2.0 + e0) / 3.0)
        }
        (ChannelKind::Combined, RecoveryKind::Perfect) => {
            Ok(2.0 / 3.0 + ((1.0 + e0) * (1.0 + e0) - 2.0) / 6.0)
        }
        (ChannelKind::Ideal, RecoveryKind::Intrinsic) => {
            Ok((3.0 - et * (s.omega0 * s.t).cos()) / 4.0)
        }
        (ChannelKind::Ideal, RecoveryKind::Dephasing | RecoveryKind::BitFlip) => {
            let w = omega_shifted(s.omega0, g)?;
            Ok(((8.0 + et) - et * (s.omega0 * s.t).cos() - 2.0 * eh * (w * s.t).cos()) / 12.0)
        }
        (ChannelKind::Dephasing, RecoveryKind::Intrinsic) => {
            Ok(((7.0 + 2.0 * e0) - (1.0 + 2.0 * e0) * et * (s.omega0 * s.t).cos()) / 12.0)
        }
        (ChannelKind::Dephasing, RecoveryKind::Dephasing) => {
            let w = omega_shifted(s.omega0, g)?;
            Ok(((7.0 + e0) + e0 * et * (1.0 - (s.omega0 * s.t).cos())
                - (1.0 + e0) * eh * (w * s.t).cos()
                - (1.0 - e0) * g * eh * sinc_w(w, s.t))
                / 12.0)
        }
        (ChannelKind::Dephasing, RecoveryKind::BitFlip | RecoveryKind::BitPhaseFlip) => {
            let w = omega_shifted(s.omega0, g)?;
            Ok(
                ((13.0 + 3.0 * e0) + (1.0 + e0) * et * (1.0 - (s.omega0 * s.t).cos())
                    - (1.0 + 3.0 * e0) * eh * (w * s.t).cos()
                    + (1.0 - e0) * g * eh * sinc_w(w, s.t))
                    / 24.0,
            )
        }
        (channel, alpha) => Err(Error::NoClosedForm(format!(
            "no printed average fidelity for channel '{}' with recovery '{}'",
            channel.label(),
            alpha.label()
        ))),
    }
}

/// The printed negativity for the scenario: channel negativities when
/// `theta` is absent, two-qubit output negativities under perfect recovery
/// when it is present.
pub fn negativity_closed(s: &ScenarioId) -> Result<f64> {
    match s.theta {
        None => {
            if s.alpha != RecoveryKind::Perfect {
                return Err(Error::NoClosedForm(
                    "channel negativities are printed for the channel states only".into(),
                ));
            }
            let e0 = e2(s.gamma, s.t0);
            match s.channel {
                ChannelKind::Ideal => Ok(1.0),
                ChannelKind::Dephasing | ChannelKind::BitFlip => Ok(e0),
                ChannelKind::Combined => Ok((0.5 * ((1.0 + e0) * (1.0 + e0) - 2.0)).max(0.0)),
            }
        }
        Some(theta) => negativity_two_closed(theta, s.gamma, s.t0, s.channel),
    }
}

/// Channel ESD time `-ln(sqrt(2) - 1)/(2 gamma)` for the combined noise.
pub fn tau_d(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    Ok(-((2.0f64).sqrt() - 1.0).ln() / (2.0 * gamma))
}

/// Two-qubit output ESD time under combined channels and perfect recovery:
/// `-ln{[sqrt(eta^2 + 6 eta + 1) - (eta + 1)]/(2 eta)}/(4 gamma)`.
pub fn tau_prime(eta: f64, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    if eta == 0.0 {
        return Err(Error::Degenerate(
            "eta = 0: no entanglement to lose; the ESD time limit is 0".into(),
        ));
    }
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidInput(format!(
            "eta must lie in (0, 1], got {eta}"
        )));
    }
    let x = ((eta * eta + 6.0 * eta + 1.0).sqrt() - (eta + 1.0)) / (2.0 * eta);
    Ok(-x.ln() / (4.0 * gamma))
}

/// Two-qubit teleportation fidelity under perfect recovery, printed for the
/// dephased and combined channel kinds (the ideal case is trivially 1).
pub fn fidelity_two_closed(theta: f64, gamma: f64, t: f64, kind: ChannelKind) -> Result<f64> {
    let eta = (2.0 * theta).sin().abs();
    let e4 = (-4.0 * gamma * t).exp();
    match kind {
        ChannelKind::Ideal => Ok(1.0),
        ChannelKind::Dephasing => Ok(1.0 - 0.5 * (1.0 - e4) * eta * eta),
        ChannelKind::Combined => {
            let e2t = e2(gamma, t);
            let e6 = (-6.0 * gamma * t).exp();
            Ok(0.25 * ((1.0 + e2t) * (1.0 + e2t) - e2t * (2.0 - e2t - e6) * eta * eta))
        }
        ChannelKind::BitFlip => Err(Error::NoClosedForm(
            "no printed two-qubit fidelity for the bit-flip channel".into(),
        )),
    }
}

/// Two-qubit output negativity under perfect recovery, clamped at zero.
pub fn negativity_two_closed(theta: f64, gamma: f64, t: f64, kind: ChannelKind) -> Result<f64> {
    let eta = (2.0 * theta).sin().abs();
    let e4 = (-4.0 * gamma * t).exp();
    match kind {
        ChannelKind::Ideal => Ok(eta),
        ChannelKind::Dephasing => Ok(e4 * eta),
        ChannelKind::Combined => Ok((0.5 * (e4 * (1.0 + e4) * eta - (1.0 - e4))).max(0.0)),
        ChannelKind::BitFlip => Err(Error::NoClosedForm(
            "no printed two-qubit negativity for the bit-flip channel".into(),
        )),
    }
}

/// Stationarity residual (zero at fidelity extrema) and the second-order
/// expression whose negative sign marks a maximum.
#[derive(Debug, Clone, Copy)]
pub struct Stationarity {
    pub residual: f64,
    pub curvature: f64,
}

/// Printed stationarity conditions for the intrinsic and dephasing
/// recoveries over the ideal channel.
pub fn stationarity_residual(
    alpha: RecoveryKind,
    gamma: f64,
    omega0: f64,
    t: f64,
) -> Result<Stationarity> {
    let (c0, s0) = ((omega0 * t).cos(), (omega0 * t).sin());
    match alpha {
        RecoveryKind::Intrinsic => Ok(Stationarity {
            residual: 2.0 * gamma * c0 + omega0 * s0,
            curvature: (omega0 * omega0 - 4.0 * gamma * gamma) * c0 - 4.0 * omega0 * gamma * s0,
        }),
        RecoveryKind::Dephasing => {
            let w = omega_shifted(omega0, gamma)?;
            let (cw, sw) = ((w * t).cos(), (w * t).sin());
            let eh = (-gamma * t).exp();
            Ok(Stationarity {
                residual: eh * ((2.0 * gamma * c0 + omega0 * s0) - 2.0 * gamma)
                    + 2.0 * (gamma * cw + w * sw),
                curvature: eh
                    * ((omega0 * omega0 - 4.0 * gamma * gamma) * c0 - 4.0 * omega0 * gamma * s0
                        + 4.0 * gamma * gamma)
                    + 2.0 * ((w * w - gamma * gamma) * cw - 2.0 * w * gamma * sw),
            })
        }
        other => Err(Error::NoClosedForm(format!(
            "no printed stationarity condition for recovery '{}'",
            other.label()
        ))),
    }
}

/// Time of the first (and largest) maximum of the intrinsic-recovery
/// fidelity: `(pi - atan(2 gamma / omega0)) / omega0`.
pub fn first_max_time_intrinsic(gamma: f64, omega0: f64) -> f64 {
    (std::f64::consts::PI - (2.0 * gamma / omega0).atan()) / omega0
}
