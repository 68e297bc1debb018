//! Shared channel states produced by transmission noise on one half of the
//! singlet: the ideal state, the dephased state zeta(t0), the bit-flipped
//! state xi(t0), and the combined state mu(t0).
//!
//! zeta and xi have printed closed matrices; mu is defined operationally by
//! evolving the singlet under both noise generators at equal rate and is
//! characterized by its closed-form negativity
//! `max{0, [(1 + exp(-2 gamma t))^2 - 2]/2}`.

use crate::bell;
use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, DensityMatrix};
use crate::lindblad::{self, LindbladModel};
use crate::tol::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Ideal,
    Dephasing,
    BitFlip,
    Combined,
}

impl ChannelKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(ChannelKind::Ideal),
            "dephasing" => Ok(ChannelKind::Dephasing),
            "bitflip" => Ok(ChannelKind::BitFlip),
            "combined" => Ok(ChannelKind::Combined),
            other => Err(Error::InvalidInput(format!(
                "unknown channel kind '{other}' (expected ideal|dephasing|bitflip|combined)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ChannelKind::Ideal => "ideal",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::BitFlip => "bitflip",
            ChannelKind::Combined => "combined",
        }
    }
}

/// Which transmission noise built the shared channel, with rate and
/// transmission time. Both are ignored for the ideal kind.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub gamma: f64,
    pub t0: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, gamma: f64, t0: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if !t0.is_finite() || t0 < 0.0 {
            return Err(Error::InvalidInput(format!(
                "t0 must be finite and >= 0, got {t0}"
            )));
        }
        Ok(ChannelSpec { kind, gamma, t0 })
    }

    pub fn ideal() -> Self {
        ChannelSpec {
            kind: ChannelKind::Ideal,
            gamma: 0.0,
            t0: 0.0,
        }
    }
}

/// Transmission-noise model: jump operators act on the second tensor factor
/// (the particle sent to the receiver), `sigma^0 (x) sigma^k`.
pub fn channel_model(kind: ChannelKind, gamma: f64) -> Result<Option<LindbladModel>> {
    let base = LindbladModel::new(ComplexMatrix::zeros(4))?;
    let model = match kind {
        ChannelKind::Ideal => return Ok(None),
        ChannelKind::Dephasing => base.with_term(pauli(0).kron(&pauli(3))?, gamma)?,
        ChannelKind::BitFlip => base.with_term(pauli(0).kron(&pauli(1))?, gamma)?,
        ChannelKind::Combined => base
            .with_term(pauli(0).kron(&pauli(1))?, gamma)?
            .with_term(pauli(0).kron(&pauli(3))?, gamma)?,
    };
    Ok(Some(model))
}

/// The channel state: closed matrices for the dephased and bit-flipped
/// kinds, engine evolution for the combined kind (no closed matrix exists).
pub fn channel_state(spec: &ChannelSpec) -> Result<DensityMatrix> {
    let e = (-2.0 * spec.gamma * spec.t0).exp();
    match spec.kind {
        ChannelKind::Ideal => Ok(bell::singlet()),
        ChannelKind::Dephasing => {
            let m = ComplexMatrix::from_real(
                4,
                &[
                    0.0,
                    0.0,
                    0.0,
                    0.0, //
                    0.0,
                    0.5,
                    -0.5 * e,
                    0.0, //
                    0.0,
                    -0.5 * e,
                    0.5,
                    0.0, //
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                ],
            )?;
            DensityMatrix::new(m, vec![2, 2])
        }
        ChannelKind::BitFlip => {
            let p = 0.25 * (1.0 - e);
            let q = 0.25 * (1.0 + e);
            let m = ComplexMatrix::from_real(
                4,
                &[
                    p, 0.0, 0.0, -p, //
                    0.0, q, -q, 0.0, //
                    0.0, -q, q, 0.0, //
                    -p, 0.0, 0.0, p,
                ],
            )?;
            DensityMatrix::new(m, vec![2, 2])
        }
        ChannelKind::Combined => channel_state_evolved(spec),
    }
}

/// Engine route for every kind: evolve the singlet under the transmission
/// model. Used as the numeric cross-check against the closed matrices.
pub fn channel_state_evolved(spec: &ChannelSpec) -> Result<DensityMatrix> {
    match channel_model(spec.kind, spec.gamma)? {
        None => Ok(bell::singlet()),
        Some(model) => lindblad::evolve(&bell::singlet(), &model, spec.t0, TOL.integrator),
    }
}

/// Printed channel negativities: 1 for ideal, exp(-2 gamma t0) for the
/// one-generator noises, `max{0, [(1+exp(-2 gamma t0))^2 - 2]/2}` for the
/// combined noise.
pub fn channel_negativity_closed(spec: &ChannelSpec) -> f64 {
    let e = (-2.0 * spec.gamma * spec.t0).exp();
    match spec.kind {
        ChannelKind::Ideal => 1.0,
        ChannelKind::Dephasing | ChannelKind::BitFlip => e,
        ChannelKind::Combined => (0.5 * ((1.0 + e) * (1.0 + e) - 2.0)).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dephasing_at_zero_time_is_singlet() {
        let spec = ChannelSpec::new(ChannelKind::Dephasing, 0.3, 0.0).unwrap();
        let state = channel_state(&spec).unwrap();
        assert!(state.matrix().max_abs_diff(bell::singlet().matrix()) < 1e-15);
    }

    #[test]
    fn dephasing_coherence_entry() {
        let (gamma, t0) = (0.1, 3.0);
        let spec = ChannelSpec::new(ChannelKind::Dephasing, gamma, t0).unwrap();
        let state = channel_state(&spec).unwrap();
        let expected = -0.5 * (-2.0 * gamma * t0).exp();
        assert_abs_diff_eq!(state.matrix().get(1, 2).re, expected, epsilon = 1e-15);
    }

    #[test]
    fn bitflip_corner_entry() {
        let (gamma, t0) = (0.1, 2.0);
        let spec = ChannelSpec::new(ChannelKind::BitFlip, gamma, t0).unwrap();
        let state = channel_state(&spec).unwrap();
        let expected = 0.25 * (1.0 - (-2.0 * gamma * t0).exp());
        assert_abs_diff_eq!(state.matrix().get(0, 0).re, expected, epsilon = 1e-15);
    }

    #[test]
    fn engine_matches_closed_matrices() {
        for kind in [ChannelKind::Dephasing, ChannelKind::BitFlip] {
            for &t0 in &[0.5, 1.0, 5.0, 10.0] {
                let spec = ChannelSpec::new(kind, 0.1, t0).unwrap();
                let closed = channel_state(&spec).unwrap();
                let evolved = channel_state_evolved(&spec).unwrap();
                let diff = closed.matrix().max_abs_diff(evolved.matrix());
                assert!(diff < 1e-8, "{kind:?} at t0 = {t0}: diff {diff:.3e}");
            }
        }
    }

    #[test]
    fn ideal_ignores_parameters() {
        let spec = ChannelSpec::new(ChannelKind::Ideal, 123.0, 456.0).unwrap();
        assert!(
            channel_state(&spec)
                .unwrap()
                .matrix()
                .max_abs_diff(bell::singlet().matrix())
                < 1e-15
        );
        assert_abs_diff_eq!(channel_negativity_closed(&spec), 1.0);
    }

    #[test]
    fn combined_negativity_closed_values() {
        // At the death time the closed form hits zero.
        let gamma = 0.1;
        let tau = -((2f64).sqrt() - 1.0).ln() / (2.0 * gamma);
        let spec = ChannelSpec::new(ChannelKind::Combined, gamma, tau).unwrap();
        assert_abs_diff_eq!(channel_negativity_closed(&spec), 0.0, epsilon = 1e-12);

        let spec10 = ChannelSpec::new(ChannelKind::Dephasing, 0.1, 10.0).unwrap();
        assert_abs_diff_eq!(
            channel_negativity_closed(&spec10),
            (-2.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn spec_rejects_bad_parameters() {
        assert!(ChannelSpec::new(ChannelKind::Dephasing, -0.1, 1.0).is_err());
        assert!(ChannelSpec::new(ChannelKind::Dephasing, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn dephased_channel_marginal_is_maximally_mixed() {
        let spec = ChannelSpec::new(ChannelKind::Dephasing, 0.1, 3.0).unwrap();
        let reduced = channel_state(&spec).unwrap().partial_trace(&[1]).unwrap();
        assert_abs_diff_eq!(reduced.matrix().get(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced.matrix().get(1, 1).re, 0.5, epsilon = 1e-12);
        assert!(reduced.matrix().get(0, 1).norm() < 1e-12);
    }
}
