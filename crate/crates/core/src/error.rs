use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the root-finding pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,

    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("radicand zero {zero} lies within {margin:e} of the positive real axis")]
    RadicandOnAxis { zero: Complex64, margin: f64 },

    #[error("argument continuation hit |W| = {modulus:e} at {at}")]
    PathThroughZero { at: Complex64, modulus: f64 },

    #[error("branch value at a pole vanishes (|f_k(±i)| = {modulus:e})")]
    PoleValueZero { modulus: f64 },

    #[error("quadrature tolerance {tol:e} not met (estimated error {abs_error:e})")]
    ToleranceNotMet { tol: f64, abs_error: f64 },

    #[error("root-formula denominator {denominator:e} below floor {floor:e}")]
    DegenerateDenominator { denominator: f64, floor: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("shift planning failed after {escalations} escalations (last A = {last_shift}): {reason}")]
    ShiftPlanningFailed {
        escalations: usize,
        last_shift: f64,
        reason: String,
    },

    #[error("contour sample at {at} touches a zero of h or the radicand")]
    ContourTouchesZero { at: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;
