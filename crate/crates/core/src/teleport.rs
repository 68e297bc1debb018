//! The teleportation pipelines.
//!
//! Single qubit: project the input and one channel half onto the Bell basis,
//! collapse the receiver's particle, then recover with a Pauli correction
//! `sigma^m`, `m = j (+) 2` (addition mod 4) -- applied exactly (perfect
//! recovery) or enacted by a coherent rotation `H_m = omega0 sigma^m / 2`
//! run for a readout time under one of four noise types.
//!
//! Two qubits: the same through two independent channel copies, with
//! per-qubit recovery rotations and per-qubit noise.
//!
//! Recovery noise types, by the jump operator used at rate gamma:
//! dephasing sigma^3, bit flip sigma^1, bit-phase flip sigma^2, and
//! intrinsic noise sigma^m (aligned with the rotation axis, so the two
//! generators commute).

use std::sync::OnceLock;

use crate::bell;
use crate::channels::{self, ChannelSpec};
use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, DensityMatrix, C64, ONE, ZERO};
use crate::lindblad::{self, LindbladModel};
use crate::quad::BlochQuadrature;
use crate::tol::TOL;

/// Bloch-parametrized pure input qubit `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy)]
pub struct PureQubit {
    pub theta: f64,
    pub phi: f64,
}

impl PureQubit {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidInput(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        if !phi.is_finite() || !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::InvalidInput(format!(
                "phi must lie in [0, 2 pi), got {phi}"
            )));
        }
        Ok(PureQubit { theta, phi })
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        let a = (self.theta / 2.0).cos();
        let s = (self.theta / 2.0).sin();
        [
            C64::new(a, 0.0),
            C64::new(self.phi.cos(), self.phi.sin()) * s,
        ]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes(), vec![2]).expect("pure qubit is valid")
    }
}

/// Two-qubit input family `cos(theta)|00> + sin(theta)|11>`, theta in [0, pi],
/// with negativity eta(theta) = |sin 2 theta|.
#[derive(Debug, Clone, Copy)]
pub struct TwoQubitInput {
    pub theta: f64,
}

impl TwoQubitInput {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidInput(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        Ok(TwoQubitInput { theta })
    }

    pub fn eta(&self) -> f64 {
        (2.0 * self.theta).sin().abs()
    }

    pub fn state_vector(&self) -> [C64; 4] {
        [
            C64::new(self.theta.cos(), 0.0),
            ZERO,
            ZERO,
            C64::new(self.theta.sin(), 0.0),
        ]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.state_vector(), vec![2, 2]).expect("input is valid")
    }
}

/// Recovery regime: perfect Pauli correction, or rotation under one of four
/// noise types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryKind {
    #[serde(rename = "p")]
    Perfect,
    #[serde(rename = "d")]
    Dephasing,
    #[serde(rename = "b")]
    BitFlip,
    #[serde(rename = "bp")]
    BitPhaseFlip,
    #[serde(rename = "i")]
    Intrinsic,
}

impl RecoveryKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "p" => Ok(RecoveryKind::Perfect),
            "d" => Ok(RecoveryKind::Dephasing),
            "b" => Ok(RecoveryKind::BitFlip),
            "bp" => Ok(RecoveryKind::BitPhaseFlip),
            "i" => Ok(RecoveryKind::Intrinsic),
            other => Err(Error::InvalidInput(format!(
                "unknown recovery kind '{other}' (expected p|d|b|bp|i)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RecoveryKind::Perfect => "p",
            RecoveryKind::Dephasing => "d",
            RecoveryKind::BitFlip => "b",
            RecoveryKind::BitPhaseFlip => "bp",
            RecoveryKind::Intrinsic => "i",
        }
    }

    /// Jump operator index for a recovery about axis m, or None for perfect
    /// recovery.
    fn jump_index(&self, m: usize) -> Option<usize> {
        match self {
            RecoveryKind::Perfect => None,
            RecoveryKind::Dephasing => Some(3),
            RecoveryKind::BitFlip => Some(1),
            RecoveryKind::BitPhaseFlip => Some(2),
            RecoveryKind::Intrinsic => Some(m),
        }
    }
}

/// Treatment of a branch whose required correction index is 0. The standard
/// rule emits the state instantly with no noise exposure; the exposed
/// variant keeps the idle qubit in the noisy environment for the full
/// readout time and exists only for sensitivity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdleRule {
    #[default]
    Noiseless,
    Exposed,
}

/// Bob's recovery regime. For `Perfect` the rate, rotation frequency and
/// readout time are ignored.
#[derive(Debug, Clone, Copy)]
pub struct RecoverySpec {
    pub kind: RecoveryKind,
    pub omega0: f64,
    pub gamma: f64,
    pub readout_time: f64,
    pub idle_rule: IdleRule,
}

impl RecoverySpec {
    pub fn perfect() -> Self {
        RecoverySpec {
            kind: RecoveryKind::Perfect,
            omega0: 0.0,
            gamma: 0.0,
            readout_time: 0.0,
            idle_rule: IdleRule::Noiseless,
        }
    }

    pub fn noisy(kind: RecoveryKind, omega0: f64, gamma: f64, readout_time: f64) -> Result<Self> {
        if kind == RecoveryKind::Perfect {
            return Ok(Self::perfect());
        }
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "omega0 must be finite and > 0, got {omega0}"
            )));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if !readout_time.is_finite() || readout_time < 0.0 {
            return Err(Error::InvalidInput(format!(
                "readout time must be finite and >= 0, got {readout_time}"
            )));
        }
        Ok(RecoverySpec {
            kind,
            omega0,
            gamma,
            readout_time,
            idle_rule: IdleRule::Noiseless,
        })
    }

    pub fn with_idle_rule(mut self, rule: IdleRule) -> Self {
        self.idle_rule = rule;
        self
    }
}

/// One measurement branch of the single-qubit protocol. `state` is `None`
/// only for a zero-probability branch, which cannot occur for the channel
/// family here.
#[derive(Debug, Clone)]
pub struct BranchOutput {
    pub outcome: usize,
    pub probability: f64,
    pub state: Option<DensityMatrix>,
}

/// Two-qubit branch with its figures of merit attached.
#[derive(Debug, Clone)]
pub struct TwoQubitBranch {
    pub outcome: (usize, usize),
    pub probability: f64,
    pub state: DensityMatrix,
    pub fidelity: f64,
    pub negativity: f64,
}

/// The four Bell projectors in protocol order.
pub fn bell_projectors() -> [ComplexMatrix; 4] {
    [
        bell::bell_projector(0),
        bell::bell_projector(1),
        bell::bell_projector(2),
        bell::bell_projector(3),
    ]
}

/// Required correction index for measurement outcome j.
#[inline]
pub fn recovery_index(j: usize) -> usize {
    (j + 2) % 4
}

/// Single-qubit recovery model about axis m (None for m = 0 or perfect
/// recovery; those apply no evolution).
fn recovery_model(m: usize, spec: &RecoverySpec) -> Result<Option<LindbladModel>> {
    if m == 0 {
        if spec.idle_rule == IdleRule::Exposed {
            if let Some(a) = spec.kind.jump_index(0) {
                let model =
                    LindbladModel::new(ComplexMatrix::zeros(2))?.with_term(pauli(a), spec.gamma)?;
                return Ok(Some(model));
            }
        }
        return Ok(None);
    }
    let Some(a) = spec.kind.jump_index(m) else {
        return Ok(None);
    };
    let h = pauli(m).scale(C64::new(0.5 * spec.omega0, 0.0));
    Ok(Some(
        LindbladModel::new(h)?.with_term(pauli(a), spec.gamma)?,
    ))
}

/// Apply the recovery for correction index m: conjugation by sigma^m when
/// perfect, master-equation evolution for the readout time otherwise. A
/// branch with m = 0 returns the state unchanged, instantly.
pub fn recovery_map(rho: &DensityMatrix, m: usize, spec: &RecoverySpec) -> Result<DensityMatrix> {
    if m > 3 {
        return Err(Error::InvalidInput(format!(
            "recovery index {m} out of range 0..=3"
        )));
    }
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "recovery_map expects a single-qubit state, got dim {}",
            rho.dim()
        )));
    }
    if m == 0 && spec.idle_rule == IdleRule::Noiseless {
        return Ok(rho.clone());
    }
    match spec.kind {
        RecoveryKind::Perfect => {
            let u = pauli(m);
            let out = &(&u * rho.matrix()) * &u;
            DensityMatrix::new(out, rho.subsystem_dims().to_vec())
        }
        _ => match recovery_model(m, spec)? {
            None => Ok(rho.clone()),
            Some(model) => lindblad::evolve(rho, &model, spec.readout_time, TOL.integrator),
        },
    }
}

/// Unnormalized post-measurement state of the receiver's particle for
/// outcome j: `tr_{A1 A2}[(Pi_j (x) 1)(|psi><psi| (x) chi)]`, contracted
/// through the rank-1 structure of the projector.
fn measurement_residue(psi: &[C64; 2], chi: &ComplexMatrix, j: usize) -> ComplexMatrix {
    let b = bell::bell_state(j);
    let mut out = ComplexMatrix::zeros(2);
    for bb in 0..2 {
        for bp in 0..2 {
            let mut acc = ZERO;
            for a1 in 0..2 {
                for a2 in 0..2 {
                    let vb = b[a1 * 2 + a2];
                    if vb == ZERO {
                        continue;
                    }
                    for a1p in 0..2 {
                        for a2p in 0..2 {
                            let vbp = b[a1p * 2 + a2p];
                            if vbp == ZERO {
                                continue;
                            }
                            acc += vb.conj()
                                * vbp
                                * (psi[a1] * psi[a1p].conj())
                                * chi.get(a2 * 2 + bb, a2p * 2 + bp);
                        }
                    }
                }
            }
            out.set(bb, bp, acc);
        }
    }
    out
}

/// The measurement branch as a superoperator on the input state
/// (column-stacked convention), built by pushing basis matrices through the
/// residue contraction.
fn measurement_superop(chi: &ComplexMatrix, j: usize) -> ComplexMatrix {
    let b = bell::bell_state(j);
    let mut s = ComplexMatrix::zeros(4);
    // Input vec index q = a1p*2 + a1 addresses rho_psi[a1, a1p].
    for a1 in 0..2 {
        for a1p in 0..2 {
            let q = a1p * 2 + a1;
            for bb in 0..2 {
                for bp in 0..2 {
                    let p = bp * 2 + bb;
                    let mut acc = ZERO;
                    for a2 in 0..2 {
                        for a2p in 0..2 {
                            let vb = b[a1 * 2 + a2];
                            let vbp = b[a1p * 2 + a2p];
                            if vb == ZERO || vbp == ZERO {
                                continue;
                            }
                            acc += vb.conj() * vbp * chi.get(a2 * 2 + bb, a2p * 2 + bp);
                        }
                    }
                    s.set(p, q, acc);
                }
            }
        }
    }
    s
}

/// Conjugation superoperator `rho -> U rho U'` in the column-stacked
/// convention: `conj(U) (x) U`.
fn conjugation_superop(u: &ComplexMatrix) -> ComplexMatrix {
    u.conjugate().kron(u).expect("small dims")
}

/// Run the four measurement branches for one input qubit.
pub fn teleport_single(
    psi: &PureQubit,
    channel: &ChannelSpec,
    rec: &RecoverySpec,
) -> Result<Vec<BranchOutput>> {
    let chi = channels::channel_state(channel)?;
    let amps = psi.amplitudes();
    let mut out = Vec::with_capacity(4);
    for j in 0..4 {
        let residue = measurement_residue(&amps, chi.matrix(), j);
        let p = residue.trace().re;
        if p < 1e-14 {
            out.push(BranchOutput {
                outcome: j,
                probability: 0.0,
                state: None,
            });
            continue;
        }
        let normalized = residue.scale(ONE / C64::new(p, 0.0));
        let state = DensityMatrix::new(normalized, vec![2])?;
        let recovered = recovery_map(&state, recovery_index(j), rec)?;
        out.push(BranchOutput {
            outcome: j,
            probability: p,
            state: Some(recovered),
        });
    }
    Ok(out)
}

fn bloch_moment_tensor() -> &'static ComplexMatrix {
    static TENSOR: OnceLock<ComplexMatrix> = OnceLock::new();
    TENSOR.get_or_init(|| BlochQuadrature::default_rule().moment_tensor())
}

fn frobenius_inner_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.data()
        .iter()
        .zip(b.data().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}

/// Bloch-averaged fidelity along a grid of readout times. The four branch
/// maps are composed from the measurement superoperators and the recovery
/// propagators, then averaged against the quadrature moment tensor (an exact
/// reordering of the node sum). For perfect recovery the curve is constant.
pub fn fidelity_curve(channel: &ChannelSpec, rec: &RecoverySpec, ts: &[f64]) -> Result<Vec<f64>> {
    fidelity_curve_with_tensor(channel, rec, ts, bloch_moment_tensor())
}

/// `fidelity_curve` against an explicit quadrature moment tensor; used to
/// check stability under quadrature refinement.
pub(crate) fn fidelity_curve_with_tensor(
    channel: &ChannelSpec,
    rec: &RecoverySpec,
    ts: &[f64],
    tensor: &ComplexMatrix,
) -> Result<Vec<f64>> {
    if ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput(
            "readout times must be finite and >= 0".into(),
        ));
    }
    let chi = channels::channel_state(channel)?;
    let meas: Vec<ComplexMatrix> = (0..4)
        .map(|j| measurement_superop(chi.matrix(), j))
        .collect();

    // Per-branch recovery propagators on the grid.
    let mut branch_props: Vec<Option<Vec<ComplexMatrix>>> = vec![None, None, None, None];
    for j in 0..4 {
        let m = recovery_index(j);
        match rec.kind {
            RecoveryKind::Perfect => {
                let s = if m == 0 {
                    ComplexMatrix::identity(4)
                } else {
                    conjugation_superop(&pauli(m))
                };
                branch_props[j] = Some(vec![s; ts.len()]);
            }
            _ => match recovery_model(m, rec)? {
                None => branch_props[j] = Some(vec![ComplexMatrix::identity(4); ts.len()]),
                Some(model) => {
                    branch_props[j] = Some(lindblad::propagator_grid(&model, ts, TOL.integrator)?);
                }
            },
        }
    }

    let mut fav = Vec::with_capacity(ts.len());
    for k in 0..ts.len() {
        let mut acc = 0.0;
        for j in 0..4 {
            let props = branch_props[j].as_ref().unwrap();
            let e = &props[k] * &meas[j];
            acc += frobenius_inner_re(&e, tensor);
        }
        fav.push(acc);
    }
    Ok(fav)
}

/// The Bloch-sphere-averaged teleportation fidelity for one scenario.
pub fn average_fidelity(channel: &ChannelSpec, rec: &RecoverySpec) -> Result<f64> {
    Ok(fidelity_curve(channel, rec, &[rec.readout_time])?[0])
}

/// Unnormalized receiver state for the two-qubit protocol, outcome
/// (j1, j2): contraction of `|Psi><Psi| (x) chi (x) chi` against the two
/// Bell projectors, qubit order (A1, A2, A3, B1, A4, B2), measured pairs
/// (A1, A3) and (A2, A4).
pub(crate) fn pre_recovery_two(
    psi: &TwoQubitInput,
    chi: &DensityMatrix,
    outcome: (usize, usize),
) -> Result<(f64, ComplexMatrix)> {
    let (j1, j2) = outcome;
    if j1 > 3 || j2 > 3 {
        return Err(Error::InvalidInput(format!(
            "outcome indices must be 0..=3, got {outcome:?}"
        )));
    }
    let v1 = bell::bell_state(j1); // indexed by a1*2 + a3
    let v2 = bell::bell_state(j2); // indexed by a2*2 + a4
    let input = psi.state_vector(); // indexed by a1*2 + a2
    let c = chi.matrix();

    let mut rb = ComplexMatrix::zeros(4);
    for a1 in 0..2 {
        for a2 in 0..2 {
            for a3 in 0..2 {
                for a4 in 0..2 {
                    let v = v1[a1 * 2 + a3] * v2[a2 * 2 + a4];
                    if v == ZERO {
                        continue;
                    }
                    for a1p in 0..2 {
                        for a2p in 0..2 {
                            for a3p in 0..2 {
                                for a4p in 0..2 {
                                    let vp = v1[a1p * 2 + a3p] * v2[a2p * 2 + a4p];
                                    if vp == ZERO {
                                        continue;
                                    }
                                    let coef = v.conj()
                                        * vp
                                        * (input[a1 * 2 + a2] * input[a1p * 2 + a2p].conj());
                                    if coef == ZERO {
                                        continue;
                                    }
                                    for b1 in 0..2 {
                                        for b2 in 0..2 {
                                            for b1p in 0..2 {
                                                for b2p in 0..2 {
                                                    let add = coef
                                                        * c.get(a3 * 2 + b1, a3p * 2 + b1p)
                                                        * c.get(a4 * 2 + b2, a4p * 2 + b2p);
                                                    let r = b1 * 2 + b2;
                                                    let s = b1p * 2 + b2p;
                                                    rb.set(r, s, rb.get(r, s) + add);
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let p = rb.trace().re;
    Ok((p, rb))
}

/// Two-qubit recovery model: rotations `(omega0/2)(sigma^m (x) 1 + 1 (x) sigma^n)`
/// with one jump operator per actively recovering qubit. A qubit whose
/// correction index is 0 idles outside both the Hamiltonian and the noise
/// (standard idle rule).
pub fn two_qubit_recovery_model(
    m: usize,
    n: usize,
    spec: &RecoverySpec,
) -> Result<Option<LindbladModel>> {
    if m > 3 || n > 3 {
        return Err(Error::InvalidInput(format!(
            "correction indices out of range: ({m}, {n})"
        )));
    }
    if spec.kind == RecoveryKind::Perfect {
        return Ok(None);
    }
    let id = pauli(0);
    let embed = |op: &ComplexMatrix, qubit: usize| -> ComplexMatrix {
        if qubit == 0 {
            op.kron(&id).unwrap()
        } else {
            id.kron(op).unwrap()
        }
    };
    let mut h = ComplexMatrix::zeros(4);
    let mut jumps: Vec<ComplexMatrix> = Vec::new();
    for (qubit, idx) in [(0usize, m), (1usize, n)] {
        let active = idx != 0 || spec.idle_rule == IdleRule::Exposed;
        if idx != 0 {
            h = &h + &embed(&pauli(idx), qubit).scale(C64::new(0.5 * spec.omega0, 0.0));
        }
        if active {
            if let Some(a) = spec.kind.jump_index(idx) {
                jumps.push(embed(&pauli(a), qubit));
            }
        }
    }
    if jumps.is_empty() && h.max_abs() == 0.0 {
        return Ok(None);
    }
    let mut model = LindbladModel::new(h)?;
    for jump in jumps {
        model = model.with_term(jump, spec.gamma)?;
    }
    Ok(Some(model))
}

/// Run one two-qubit branch end to end and attach fidelity and negativity.
pub fn teleport_two(
    psi: &TwoQubitInput,
    channel: &ChannelSpec,
    rec: &RecoverySpec,
    outcome: (usize, usize),
) -> Result<TwoQubitBranch> {
    let traj = ReadoutTrajectory::new(psi, channel, rec, outcome)?;
    let state = traj.state_at(rec.readout_time)?;
    let fidelity = traj.fidelity_of(&state);
    let negativity = crate::analysis::negativity(&state, 0)?;
    Ok(TwoQubitBranch {
        outcome,
        probability: traj.probability,
        state,
        fidelity,
        negativity,
    })
}

/// One two-qubit branch prepared for readout-time scans: the collapsed
/// pre-recovery state plus the recovery model, evolvable to any time.
pub struct ReadoutTrajectory {
    pub probability: f64,
    initial: DensityMatrix,
    model: Option<LindbladModel>,
    perfect: Option<ComplexMatrix>,
    target: [C64; 4],
}

impl ReadoutTrajectory {
    pub fn new(
        psi: &TwoQubitInput,
        channel: &ChannelSpec,
        rec: &RecoverySpec,
        outcome: (usize, usize),
    ) -> Result<Self> {
        let chi = channels::channel_state(channel)?;
        let (p, residue) = pre_recovery_two(psi, &chi, outcome)?;
        if p < 1e-14 {
            return Err(Error::Degenerate(format!(
                "branch {outcome:?} has zero probability"
            )));
        }
        let initial = DensityMatrix::new(residue.scale(ONE / C64::new(p, 0.0)), vec![2, 2])?;
        let m = recovery_index(outcome.0);
        let n = recovery_index(outcome.1);
        let (model, perfect) = match rec.kind {
            RecoveryKind::Perfect => {
                let u = pauli(m).kron(&pauli(n))?;
                (None, Some(u))
            }
            _ => (two_qubit_recovery_model(m, n, rec)?, None),
        };
        Ok(ReadoutTrajectory {
            probability: p,
            initial,
            model,
            perfect,
            target: psi.state_vector(),
        })
    }

    /// State after running the recovery for time `t`.
    pub fn state_at(&self, t: f64) -> Result<DensityMatrix> {
        if let Some(u) = &self.perfect {
            let out = &(u * self.initial.matrix()) * u;
            return DensityMatrix::new(out, vec![2, 2]);
        }
        match &self.model {
            None => Ok(self.initial.clone()),
            Some(model) => lindblad::evolve(&self.initial, model, t, TOL.integrator),
        }
    }

    /// States on an ascending readout-time grid (cumulative integration).
    pub fn states_on_grid(&self, ts: &[f64]) -> Result<Vec<DensityMatrix>> {
        if let Some(model) = &self.model {
            let props = lindblad::propagator_grid(model, ts, TOL.integrator)?;
            props
                .iter()
                .map(|s| {
                    let m = lindblad::apply_superop(s, self.initial.matrix());
                    DensityMatrix::new(m, vec![2, 2])
                })
                .collect()
        } else {
            ts.iter().map(|&t| self.state_at(t)).collect()
        }
    }

    /// Overlap with the original input.
    pub fn fidelity_of(&self, state: &DensityMatrix) -> f64 {
        state.expectation(&self.target)
    }

    /// The recovery model, if the branch evolves at all (None for perfect
    /// recovery and for a doubly idle branch).
    pub fn model(&self) -> Option<&LindbladModel> {
        self.model.as_ref()
    }
}
