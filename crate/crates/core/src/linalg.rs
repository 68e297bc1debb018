//! Dense complex matrix kernel for the small dimensions used here (2, 4, 16,
//! plus transient intermediates): products, tensor products, partial trace,
//! partial transpose and Hermitian eigenvalues.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::TOL;

pub type C64 = Complex64;

/// Largest dimension `kron` will produce. The six-qubit intermediate of the
/// two-qubit teleportation pipeline (dim 64) is the biggest object built
/// anywhere in the crate.
pub const MAX_KRON_DIM: usize = 64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| format!("{:+.4}{:+.4}i", self.get(i, j).re, self.get(i, j).im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        m
    }

    /// Build from a flat row-major slice of length dim^2.
    pub fn from_flat(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(ComplexMatrix {
            dim,
            data: entries.to_vec(),
        })
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let complexed: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_flat(dim, &complexed)
    }

    /// Outer product |v><w| of two state vectors.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let dim = v.len();
        assert_eq!(dim, w.len(), "outer product needs equal lengths");
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * w[j].conj());
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conjugate()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entrywise |a - b|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff needs equal dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Apply `self` to a state vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "apply needs a vector of matching length");
        let mut out = vec![ZERO; self.dim];
        for i in 0..self.dim {
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Kronecker product; subsystem 0 is the left factor, so the joint basis
    /// index is i_a * dim_b + i_b.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_KRON_DIM {
            return Err(Error::DimensionMismatch(format!(
                "kron result dim {dim} exceeds supported maximum {MAX_KRON_DIM}"
            )));
        }
        let mut out = Self::zeros(dim);
        for ia in 0..self.dim {
            for ja in 0..self.dim {
                let a = self.get(ia, ja);
                if a == ZERO {
                    continue;
                }
                for ib in 0..other.dim {
                    for jb in 0..other.dim {
                        out.set(
                            ia * other.dim + ib,
                            ja * other.dim + jb,
                            a * other.get(ib, jb),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// All eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi
    /// rotations. Rejects non-Hermitian input.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let dev = self.max_abs_diff(&self.adjoint());
        if dev > TOL.hermiticity {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol: TOL.hermiticity,
            });
        }
        jacobi_eigenvalues(self)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add needs equal dims");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub needs equal dims");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "mul needs equal dims");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

/// Pauli matrix sigma^m for m in 0..=3 (sigma^0 = identity).
pub fn pauli(m: usize) -> ComplexMatrix {
    assert!(m < 4, "pauli index must be 0..=3");
    let mut s = ComplexMatrix::zeros(2);
    match m {
        0 => {
            s.set(0, 0, ONE);
            s.set(1, 1, ONE);
        }
        1 => {
            s.set(0, 1, ONE);
            s.set(1, 0, ONE);
        }
        2 => {
            s.set(0, 1, -I);
            s.set(1, 0, I);
        }
        _ => {
            s.set(0, 0, ONE);
            s.set(1, 1, -ONE);
        }
    }
    s
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let prod: usize = dims.iter().product();
    if prod != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {:?} multiply to {prod}, matrix dim is {}",
            dims,
            m.dim()
        )));
    }
    Ok(())
}

/// Index decomposition helpers: basis index <-> per-subsystem digits, with
/// subsystem 0 as the most significant digit (left tensor factor).
fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0usize;
    for k in 0..dims.len() {
        idx = idx * dims[k] + digits[k];
    }
    idx
}

/// Partial trace over the subsystems NOT listed in `keep`; kept subsystems
/// stay in their original relative order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if keep.is_empty() {
        return Err(Error::InvalidInput("keep set must be nonempty".into()));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || seen[k] {
            return Err(Error::InvalidInput(format!(
                "invalid subsystem index {k} in keep set"
            )));
        }
        seen[k] = true;
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !seen[*k]).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    let mut out = ComplexMatrix::zeros(out_dim);
    for r in 0..out_dim {
        let rk = digits(r, &keep_dims);
        for c in 0..out_dim {
            let ck = digits(c, &keep_dims);
            let mut acc = ZERO;
            for t in 0..traced_dim {
                let td = digits(t, &traced.iter().map(|&k| dims[k]).collect::<Vec<_>>());
                let mut rd = vec![0usize; dims.len()];
                let mut cd = vec![0usize; dims.len()];
                for (pos, &k) in keep.iter().enumerate() {
                    rd[k] = rk[pos];
                    cd[k] = ck[pos];
                }
                for (pos, &k) in traced.iter().enumerate() {
                    rd[k] = td[pos];
                    cd[k] = td[pos];
                }
                acc += m.get(index_of(&rd, dims), index_of(&cd, dims));
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Transpose applied to one tensor factor only.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    subsystem: usize,
) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::InvalidInput(format!(
            "invalid subsystem index {subsystem}"
        )));
    }
    let mut out = ComplexMatrix::zeros(m.dim());
    for r in 0..m.dim() {
        let mut rd = digits(r, dims);
        for c in 0..m.dim() {
            let mut cd = digits(c, dims);
            std::mem::swap(&mut rd[subsystem], &mut cd[subsystem]);
            let rr = index_of(&rd, dims);
            let cc = index_of(&cd, dims);
            std::mem::swap(&mut rd[subsystem], &mut cd[subsystem]);
            out.set(rr, cc, m.get(r, c));
        }
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix by the cyclic complex Jacobi method.
fn jacobi_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 1 {
        return Ok(vec![m.get(0, 0).re]);
    }
    let mut a = m.clone();
    // Symmetrize to kill roundoff-level asymmetry.
    let adj = a.adjoint();
    a = (&a + &adj).scale(C64::new(0.5, 0.0));

    let max_sweeps = 60;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= TOL.eigen_offdiag * a.max_abs().max(1.0) {
            let mut evs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
            evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(evs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.norm() <= f64::EPSILON * a.max_abs().max(1.0) {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // Phase so the rotated off-diagonal element is real.
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                // Columns: col_p -> c*col_p + s*phase*col_q ; col_q -> -s*conj(phase)*col_p + c*col_q
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c + aiq * phase.conj() * s);
                    a.set(i, q, -aip * phase * s + aiq * c);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c + aqj * phase * s);
                    a.set(q, j, -apj * phase.conj() * s + aqj * c);
                }
            }
        }
    }
    Err(Error::EigenNoConvergence(max_sweeps))
}

/// Hermitian, unit-trace, positive-semidefinite state over an ordered list
/// of tensor factors. Leftmost factor is subsystem 0; for qubits the basis
/// index is q0*2 + q1 (two qubits), etc.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    subsystem_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validate the three state invariants and wrap.
    pub fn new(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &subsystem_dims)?;
        let herm_dev = matrix.max_abs_diff(&matrix.adjoint());
        if herm_dev > TOL.hermiticity {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity deviation {herm_dev:.3e} > {:.1e}",
                TOL.hermiticity
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL.unit_trace || tr.im.abs() > TOL.unit_trace {
            return Err(Error::NotDensityMatrix(format!(
                "trace {tr} deviates from 1 by more than {:.1e}",
                TOL.unit_trace
            )));
        }
        let evs = matrix.hermitian_eigenvalues()?;
        let min_ev = evs[0];
        if min_ev < TOL.positivity_floor {
            return Err(Error::NotDensityMatrix(format!(
                "smallest eigenvalue {min_ev:.3e} below floor {:.1e}",
                TOL.positivity_floor
            )));
        }
        Ok(DensityMatrix {
            matrix,
            subsystem_dims,
        })
    }

    /// |psi><psi| for a normalized state vector.
    pub fn from_pure(state: &[C64], subsystem_dims: Vec<usize>) -> Result<Self> {
        let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "state vector norm^2 = {norm2} is not 1"
            )));
        }
        Self::new(ComplexMatrix::outer(state, state), subsystem_dims)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Reduced state over the kept subsystems.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let reduced = partial_trace_matrix(&self.matrix, &self.subsystem_dims, keep)?;
        let dims = keep.iter().map(|&k| self.subsystem_dims[k]).collect();
        DensityMatrix::new(reduced, dims)
    }

    /// Transpose on the chosen subsystem. Returns a plain matrix: the result
    /// is Hermitian but generally not positive.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        partial_transpose_matrix(&self.matrix, &self.subsystem_dims, subsystem)
    }

    /// <psi| rho |psi>.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let v = self.matrix.apply(psi);
        psi.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum()
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |xs| {
            let mut m = ComplexMatrix::zeros(dim);
            let mut it = xs.into_iter();
            for i in 0..dim {
                let (re, _) = it.next().unwrap();
                m.set(i, i, C64::new(re, 0.0));
            }
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let (re, im) = it.next().unwrap();
                    m.set(i, j, C64::new(re, im));
                    m.set(j, i, C64::new(re, -im));
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn eig_sum_matches_trace(m in arb_hermitian(4)) {
            let evs = m.hermitian_eigenvalues().unwrap();
            let sum: f64 = evs.iter().sum();
            prop_assert!((sum - m.trace().re).abs() < 1e-10);
        }

        #[test]
        fn partial_transpose_involution(m in arb_hermitian(4)) {
            let pt = partial_transpose_matrix(&m, &[2, 2], 0).unwrap();
            let back = partial_transpose_matrix(&pt, &[2, 2], 0).unwrap();
            prop_assert!(back.max_abs_diff(&m) < 1e-14);
        }

        #[test]
        fn kron_then_trace_factorizes(a in arb_hermitian(2), b in arb_hermitian(2)) {
            let k = a.kron(&b).unwrap();
            let ta = a.trace();
            let tb = b.trace();
            prop_assert!((k.trace() - ta * tb).norm() < 1e-12);
        }
    }
}
