//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e} > tol {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integrator step size underflow at t = {t:.6} (h = {h:.3e}); system too stiff for the requested tolerance")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("trace drift {drift:.3e} exceeds guard {guard:.3e} after evolution to t = {t:.6}")]
    TraceDrift { t: f64, drift: f64, guard: f64 },

    #[error("no closed form printed for this scenario: {0}")]
    NoClosedForm(String),

    #[error("overdamped regime (omega0 = {omega0} <= gamma = {gamma}): closed form not covered")]
    Overdamped { omega0: f64, gamma: f64 },

    #[error("degenerate scenario: {0}")]
    Degenerate(String),

    #[error("eigenvalue iteration failed to converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("no sign change in bracket [{lo}, {hi}]: {context}")]
    NoBracket { lo: f64, hi: f64, context: String },

    #[error("no interior maximum found on [0, {t_scan}]")]
    NoInteriorMaximum { t_scan: f64 },

    #[error("negativity revived at t = {at:.6} after apparent death at t = {death:.6}")]
    NegativityRevival { death: f64, at: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
