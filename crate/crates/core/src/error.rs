use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("adaptive quadrature did not reach tolerance: last two values {last} and {previous}")]
    ToleranceNotMet { last: Complex64, previous: Complex64 },

    #[error("measure is not normalized: total mass {mass} (tolerance {tol:e})")]
    NotNormalized { mass: Complex64, tol: f64 },

    #[error("invalid measure description: {0}")]
    InvalidMeasure(String),

    #[error("moment matrix of order {k} is near singular (|det| = {det:e}); the measure is likely outside the class with unique one-sided polynomials")]
    NearSingularMoments { k: usize, det: f64 },

    #[error("malformed ladder: {0}")]
    MalformedLadder(String),

    #[error("malformed nonlinear Fourier pair: {0}")]
    MalformedPair(String),

    #[error("layer stripping degenerate at step {step}: |a(0)| = {a0:e}")]
    StrippingDegenerate { step: usize, a0: f64 },

    #[error("pair is not an exact finite nonlinear Fourier series (residual {residual:e})")]
    NotExactNlfs { residual: f64 },

    #[error("sup |b| = {sup} violates the bound sup |b| < 2^(-1/2)")]
    HypothesisViolated { sup: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
