//! Centralized numeric tolerances and search constants.
//!
//! Every validity check and root/extremum search in the crate reads its
//! thresholds from here, so property tests and production code cannot
//! drift apart.

/// Tolerances for state validity and the master-equation integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max entrywise |M - M†| for a matrix to count as Hermitian.
    pub hermiticity: f64,
    /// Max |tr(rho) - 1| for a density matrix.
    pub unit_trace: f64,
    /// Smallest admissible eigenvalue of a density matrix (negative floor).
    pub positivity_floor: f64,
    /// Local error control for the adaptive integrator.
    pub integrator: f64,
    /// Trace drift beyond which an evolution run fails loudly.
    pub trace_drift_guard: f64,
    /// Off-diagonal norm at which the Jacobi eigenvalue sweep stops.
    pub eigen_offdiag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            unit_trace: 1e-10,
            positivity_floor: -1e-9,
            integrator: 1e-10,
            trace_drift_guard: 1e-9,
            eigen_offdiag: 1e-14,
        }
    }
}

pub const TOL: Tolerances = Tolerances {
    hermiticity: 1e-10,
    unit_trace: 1e-10,
    positivity_floor: -1e-9,
    integrator: 1e-10,
    trace_drift_guard: 1e-9,
    eigen_offdiag: 1e-14,
};

/// Constants for ESD detection, extremum location and critical-frequency
/// root finding. Fixed so table outputs are reproducible bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Coarse scan step for ESD detection.
    pub esd_scan_dt: f64,
    /// Bisection tolerance on the death time.
    pub esd_bisect_tol: f64,
    /// Negativity at or below this value counts as zero.
    pub esd_zero_tol: f64,
    /// Span after the death over which negativity must stay zero.
    pub esd_verify_span: f64,
    /// Coarse step for first-maximum location, as a fraction of 1/omega0.
    pub first_max_dt_factor: f64,
    /// Golden-section tolerance in t for the first maximum.
    pub first_max_tol: f64,
    /// Scan bound for the first maximum, as a multiple of pi/omega0.
    pub first_max_scan_periods: f64,
    /// Lower bracket floor for the critical-omega bisection.
    pub omega_bracket_floor: f64,
    /// Upper bracket for the critical-omega bisection.
    pub omega_bracket_hi: f64,
    /// Bisection tolerance in omega0.
    pub omega_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            esd_scan_dt: 0.01,
            esd_bisect_tol: 1e-6,
            esd_zero_tol: 1e-9,
            esd_verify_span: 5.0,
            first_max_dt_factor: 0.005,
            first_max_tol: 1e-8,
            first_max_scan_periods: 4.0,
            omega_bracket_floor: 0.05,
            omega_bracket_hi: 5.0,
            omega_tol: 1e-6,
        }
    }
}

pub const SEARCH: SearchConfig = SearchConfig {
    esd_scan_dt: 0.01,
    esd_bisect_tol: 1e-6,
    esd_zero_tol: 1e-9,
    esd_verify_span: 5.0,
    first_max_dt_factor: 0.005,
    first_max_tol: 1e-8,
    first_max_scan_periods: 4.0,
    omega_bracket_floor: 0.05,
    omega_bracket_hi: 5.0,
    omega_tol: 1e-6,
};
