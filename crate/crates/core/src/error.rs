use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("x = {x} lies outside the supported domain ({domain})")]
    OutOfDomain { x: f64, domain: &'static str },

    #[error("basis mismatch: expected {expected}")]
    BasisMismatch { expected: &'static str },

    /// The Chebyshev tail carries more than the allowed share of the coefficient mass.
    #[error("under-resolved series: tail ratio {tail_ratio:.3e} exceeds {threshold:.1e}")]
    Resolution { tail_ratio: f64, threshold: f64 },

    /// The weighted Parseval identity needs `a_0 = 0`; the exact relation is `lhs = rhs - pi * a0^2`.
    #[error(
        "mean value is not zero: a0 = {a0:.6e}; lhs = {lhs:.12e}, rhs = {rhs:.12e}, \
         corrected identity gives rhs - pi*a0^2 = {corrected_rhs:.12e}"
    )]
    MeanValueNonzero {
        a0: f64,
        lhs: f64,
        rhs: f64,
        corrected_rhs: f64,
    },

    #[error("principal value oracle failed at x = {x}: {reason}")]
    OracleFailure { x: f64, reason: String },

    #[error("psi = {psi} too close to an endpoint (1/sin(psi) = {amplification:.3e})")]
    NearEndpoint { psi: f64, amplification: f64 },

    #[error("degenerate weight: beta[{k}] = {beta:.3e} is not positive")]
    DegenerateWeight { k: usize, beta: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("out of support: value {value} outside [{lo}, {hi}]")]
    OutOfSupport { value: f64, lo: f64, hi: f64 },

    #[error("unstable step at t = {t}: mass loss {loss:.3e} exceeds {limit:.3e}")]
    Instability { t: f64, loss: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
