//! Bloch-sphere quadrature for the average-fidelity integral: Gauss-Legendre
//! in cos(theta) crossed with a uniform periodic rule in phi. The integrands
//! are low-degree trigonometric polynomials, so the default 32 x 64 rule is
//! exact to machine precision.

use crate::linalg::{ComplexMatrix, C64};

pub const DEFAULT_THETA_NODES: usize = 32;
pub const DEFAULT_PHI_NODES: usize = 64;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Quadrature nodes (psi amplitudes) and weights over the Bloch sphere with
/// total weight 4 pi.
pub struct BlochQuadrature {
    pub nodes: Vec<([C64; 2], f64)>,
}

impl BlochQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (us, wus) = gauss_legendre(n_theta);
        let wphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for (u, wu) in us.iter().zip(&wus) {
            let theta = u.acos();
            let a = (theta / 2.0).cos();
            let s = (theta / 2.0).sin();
            for k in 0..n_phi {
                let phi = wphi * k as f64;
                let b = C64::new(phi.cos(), phi.sin()) * s;
                nodes.push(([C64::new(a, 0.0), b], wu * wphi));
            }
        }
        BlochQuadrature { nodes }
    }

    pub fn default_rule() -> Self {
        Self::new(DEFAULT_THETA_NODES, DEFAULT_PHI_NODES)
    }

    /// Average of `f(psi)` over the sphere (total weight normalized out).
    pub fn average(&self, mut f: impl FnMut(&[C64; 2]) -> f64) -> f64 {
        let total: f64 = self.nodes.iter().map(|(_, w)| w).sum();
        let acc: f64 = self.nodes.iter().map(|(psi, w)| w * f(psi)).sum();
        acc / total
    }

    /// Fourth-moment tensor of the quadrature in the column-stacked
    /// superoperator index convention:
    /// `T[p, q] = avg(conj(psi_i) psi_j psi_k conj(psi_l))` with
    /// `p = j*2 + i`, `q = l*2 + k`, so that for any branch superoperator S
    /// acting on vec(|psi><psi|), `avg(<psi| S(|psi><psi|) |psi>) = sum S .* T`.
    pub fn moment_tensor(&self) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(4);
        let total: f64 = self.nodes.iter().map(|(_, w)| w).sum();
        for (psi, w) in &self.nodes {
            let w = C64::new(w / total, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            let p = j * 2 + i;
                            let q = l * 2 + k;
                            let v =
                                t.get(p, q) + w * psi[i].conj() * psi[j] * psi[k] * psi[l].conj();
                            t.set(p, q, v);
                        }
                    }
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        // integral of x^8 over [-1,1] = 2/9 (degree 8 <= 2*5-1)
        let acc: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert_abs_diff_eq!(acc, 2.0 / 9.0, epsilon = 1e-14);
        let total: f64 = w.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn sphere_averages_of_bloch_components() {
        let q = BlochQuadrature::default_rule();
        // E[|a|^2] = 1/2, E[|a|^4 + |b|^4] = 2/3, E[|a|^2 |b|^2] = 1/6
        let ea2 = q.average(|psi| psi[0].norm_sqr());
        let e44 = q.average(|psi| psi[0].norm_sqr().powi(2) + psi[1].norm_sqr().powi(2));
        let e22 = q.average(|psi| psi[0].norm_sqr() * psi[1].norm_sqr());
        assert_abs_diff_eq!(ea2, 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(e44, 2.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e22, 1.0 / 6.0, epsilon = 1e-13);
    }

    #[test]
    fn refinement_changes_nothing_measurable() {
        let coarse = BlochQuadrature::default_rule();
        let fine = BlochQuadrature::new(64, 128);
        let f = |psi: &[C64; 2]| {
            let x = (psi[0].conj() * psi[1]).re;
            let z = psi[0].norm_sqr() - psi[1].norm_sqr();
            x * x + 0.3 * z * z + 0.1 * z
        };
        assert_abs_diff_eq!(coarse.average(f), fine.average(f), epsilon = 1e-12);
    }
}
