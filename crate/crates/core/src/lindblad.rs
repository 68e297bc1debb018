//! Markovian master-equation engine.
//!
//! Builds the Liouvillian superoperator of
//!
//! ```text
//! drho/dt = -i[H, rho] + sum_k (gamma_k/2)(2 L_k rho L_k' - L_k'L_k rho - rho L_k'L_k)
//! ```
//!
//! on column-stacked states (`vec(rho)[j*d + i] = rho[i,j]`) and propagates
//! it two independent ways: adaptive step-doubling RK4 on the vectorized ODE
//! (the production path) and a scaling-and-squaring Taylor exponential (the
//! cross-check path, used by tests).

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, C64, ONE, ZERO};
use crate::tol::TOL;

/// One dissipative channel: jump operator L_k with rate gamma_k.
#[derive(Debug, Clone)]
pub struct LindbladTerm {
    pub jump: ComplexMatrix,
    pub rate: f64,
}

/// Hamiltonian (hbar = 1) plus dissipative terms, all on one fixed dimension.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    terms: Vec<LindbladTerm>,
}

impl LindbladModel {
    pub fn new(hamiltonian: ComplexMatrix) -> Result<Self> {
        if !hamiltonian.is_hermitian(TOL.hermiticity) {
            return Err(Error::NotHermitian {
                deviation: hamiltonian.max_abs_diff(&hamiltonian.adjoint()),
                tol: TOL.hermiticity,
            });
        }
        Ok(LindbladModel {
            hamiltonian,
            terms: Vec::new(),
        })
    }

    pub fn with_term(mut self, jump: ComplexMatrix, rate: f64) -> Result<Self> {
        if jump.dim() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch(format!(
                "jump operator dim {} does not match system dim {}",
                jump.dim(),
                self.hamiltonian.dim()
            )));
        }
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidInput(format!(
                "rate must be finite and >= 0, got {rate}"
            )));
        }
        self.terms.push(LindbladTerm { jump, rate });
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn terms(&self) -> &[LindbladTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }
}

/// Trajectory sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// The d^2 x d^2 generator acting on column-stacked rho:
/// `-i(I (x) H - H^T (x) I) + sum_k gamma_k/2 (2 conj(L) (x) L - I (x) L'L - (L'L)^T (x) I)`.
pub fn build_liouvillian(model: &LindbladModel) -> ComplexMatrix {
    let d = model.dim();
    let id = ComplexMatrix::identity(d);
    let h = &model.hamiltonian;
    let minus_i = C64::new(0.0, -1.0);

    let mut l = (&id.kron(h).unwrap() - &h.transpose().kron(&id).unwrap()).scale(minus_i);
    for term in &model.terms {
        let half_rate = C64::new(0.5 * term.rate, 0.0);
        let jd = term.jump.adjoint();
        let jdj = &jd * &term.jump;
        let sandwich = term
            .jump
            .conjugate()
            .kron(&term.jump)
            .unwrap()
            .scale(C64::new(2.0, 0.0));
        let left = id.kron(&jdj).unwrap();
        let right = jdj.transpose().kron(&id).unwrap();
        l = &l + &(&(&sandwich - &left) - &right).scale(half_rate);
    }
    l
}

#[inline]
fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let d = m.dim();
    let mut v = vec![ZERO; d * d];
    for j in 0..d {
        for i in 0..d {
            v[j * d + i] = m.get(i, j);
        }
    }
    v
}

#[inline]
fn unvectorize(v: &[C64], d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d);
    for j in 0..d {
        for i in 0..d {
            m.set(i, j, v[j * d + i]);
        }
    }
    m
}

/// Block state for the RK stepper: `k` column vectors of length `n`,
/// evolving under the same generator.
#[derive(Clone)]
struct Block {
    n: usize,
    k: usize,
    data: Vec<C64>,
}

impl Block {
    fn from_columns(cols: Vec<Vec<C64>>) -> Self {
        let n = cols[0].len();
        let k = cols.len();
        let mut data = Vec::with_capacity(n * k);
        for c in cols {
            assert_eq!(c.len(), n);
            data.extend(c);
        }
        Block { n, k, data }
    }

    fn column(&self, c: usize) -> &[C64] {
        &self.data[c * self.n..(c + 1) * self.n]
    }

    fn apply_generator(&self, l: &ComplexMatrix) -> Block {
        let mut out = Block {
            n: self.n,
            k: self.k,
            data: vec![ZERO; self.n * self.k],
        };
        for c in 0..self.k {
            let src = self.column(c);
            let dst = &mut out.data[c * self.n..(c + 1) * self.n];
            for i in 0..self.n {
                let mut acc = ZERO;
                for j in 0..self.n {
                    acc += l.get(i, j) * src[j];
                }
                dst[i] = acc;
            }
        }
        out
    }

    fn axpy(&mut self, a: f64, other: &Block) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += C64::new(a, 0.0) * y;
        }
    }

    fn max_abs_diff(&self, other: &Block) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn rk4_step(l: &ComplexMatrix, y: &Block, h: f64) -> Block {
    let k1 = y.apply_generator(l);
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, &k1);
    let k2 = y2.apply_generator(l);
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = y3.apply_generator(l);
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = y4.apply_generator(l);

    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

/// Advance `y` from `t0` to `t1` with step-doubling error control: each
/// accepted step compares one full step against two half steps and keeps the
/// locally extrapolated combination of the pair.
fn rk_advance(l: &ComplexMatrix, y: &mut Block, t0: f64, t1: f64, tol: f64) -> Result<()> {
    if t1 <= t0 {
        return Ok(());
    }
    let span = t1 - t0;
    let mut t = t0;
    // Initial guess keyed to the generator scale.
    let scale = l.max_abs().max(1e-6);
    let mut h = (0.5 / scale).min(span);

    while t < t1 {
        h = h.min(t1 - t);
        if h < 1e-12 * t1.max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let full = rk4_step(l, y, h);
        let mut half = rk4_step(l, y, 0.5 * h);
        half = rk4_step(l, &half, 0.5 * h);
        let err = full.max_abs_diff(&half) / 15.0;

        if err <= tol {
            // half + (half - full)/15 cancels the leading error term.
            for (hx, fx) in half.data.iter_mut().zip(&full.data) {
                *hx += (*hx - fx) / 15.0;
            }
            *y = half;
            t += h;
            let grow = if err > 0.0 {
                0.9 * (tol / err).powf(0.2)
            } else {
                4.0
            };
            h *= grow.clamp(0.5, 4.0);
        } else {
            let shrink = 0.9 * (tol / err).powf(0.2);
            h *= shrink.clamp(0.1, 0.9);
        }
    }
    Ok(())
}

fn finalize_state(v: &[C64], d: usize, dims: &[usize], t: f64) -> Result<DensityMatrix> {
    let m = unvectorize(v, d);
    let tr = m.trace();
    let drift = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
    if drift > TOL.trace_drift_guard {
        return Err(Error::TraceDrift {
            t,
            drift,
            guard: TOL.trace_drift_guard,
        });
    }
    // Renormalize the guarded remainder.
    let normalized = m.scale(ONE / tr);
    DensityMatrix::new(normalized, dims.to_vec())
}

/// Evolve a state to time `t` with local error control `tol` (production
/// path: adaptive RK4 on the vectorized ODE).
pub fn evolve(
    rho0: &DensityMatrix,
    model: &LindbladModel,
    t: f64,
    tol: f64,
) -> Result<DensityMatrix> {
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs model dim {}",
            rho0.dim(),
            model.dim()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidInput(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let l = build_liouvillian(model);
    let mut y = Block::from_columns(vec![vectorize(rho0.matrix())]);
    rk_advance(&l, &mut y, 0.0, t, tol)?;
    finalize_state(y.column(0), model.dim(), rho0.subsystem_dims(), t)
}

/// Trajectory at 0, dt, 2 dt, ..., up to t_max.
pub fn evolve_grid(
    rho0: &DensityMatrix,
    model: &LindbladModel,
    t_max: f64,
    dt: f64,
    tol: f64,
) -> Result<EvolutionResult> {
    if dt <= 0.0 || dt.is_nan() {
        return Err(Error::InvalidInput(format!("dt must be > 0, got {dt}")));
    }
    if t_max < 0.0 || t_max.is_nan() {
        return Err(Error::InvalidInput(format!(
            "t_max must be >= 0, got {t_max}"
        )));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();

    let l = build_liouvillian(model);
    let mut y = Block::from_columns(vec![vectorize(rho0.matrix())]);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for w in times.windows(2) {
        rk_advance(&l, &mut y, w[0], w[1], tol)?;
        states.push(finalize_state(
            y.column(0),
            model.dim(),
            rho0.subsystem_dims(),
            w[1],
        )?);
    }
    Ok(EvolutionResult { times, states })
}

/// Cross-check path: propagate with expm(L t) via scaling-and-squaring of a
/// Taylor series.
pub fn evolve_expm(rho0: &DensityMatrix, model: &LindbladModel, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs model dim {}",
            rho0.dim(),
            model.dim()
        )));
    }
    let l = build_liouvillian(model).scale(C64::new(t, 0.0));
    let e = expm(&l);
    let v = vectorize(rho0.matrix());
    let out = e.apply(&v);
    finalize_state(&out, model.dim(), rho0.subsystem_dims(), t)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub(crate) fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    let norm = m.max_abs() * m.dim() as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.scale(C64::new(1.0 / 2f64.powi(squarings as i32), 0.0));

    let mut result = ComplexMatrix::identity(m.dim());
    let mut term = ComplexMatrix::identity(m.dim());
    for k in 1..200 {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Evolution superoperators S(t_k) on an ascending time grid, so that
/// `vec(rho(t_k)) = S(t_k) vec(rho(0))`. Integrated cumulatively with the
/// same adaptive stepper as `evolve`.
pub(crate) fn propagator_grid(
    model: &LindbladModel,
    ts: &[f64],
    tol: f64,
) -> Result<Vec<ComplexMatrix>> {
    let d = model.dim();
    let n = d * d;
    let l = build_liouvillian(model);
    let id_cols: Vec<Vec<C64>> = (0..n)
        .map(|c| {
            let mut col = vec![ZERO; n];
            col[c] = ONE;
            col
        })
        .collect();
    let mut y = Block::from_columns(id_cols);
    let mut out = Vec::with_capacity(ts.len());
    let mut t_prev = 0.0;
    for &t in ts {
        if t < t_prev {
            return Err(Error::InvalidInput("time grid must be ascending".into()));
        }
        rk_advance(&l, &mut y, t_prev, t, tol)?;
        t_prev = t;
        let mut s = ComplexMatrix::zeros(n);
        for c in 0..n {
            let col = y.column(c);
            for r in 0..n {
                s.set(r, c, col[r]);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Apply a superoperator (as produced by `propagator_grid`) to a state matrix.
pub(crate) fn apply_superop(s: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.dim();
    let v = vectorize(m);
    let out = s.apply(&v);
    unvectorize(&out, d)
}
