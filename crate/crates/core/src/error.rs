use thiserror::Error;

use crate::samplers::RejectionReport;

/// Errors produced by the state, density and sampling routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0} (expected {1})")]
    InvalidTrace(f64, f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid eigenvalue vector: {0}")]
    InvalidEigenvalues(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("finite-difference step left the state space after {attempts} attempts (last h = {h:e})")]
    StepSize { attempts: u32, h: f64 },

    #[error("dimension {0} unsupported for {1}")]
    UnsupportedDimension(usize, &'static str),

    #[error("closed-form purity moment not validated for N = {dim}, k = {k}; use the Monte-Carlo moment source")]
    UnvalidatedClosedForm { dim: usize, k: usize },

    #[error("quadrature did not converge: estimate {estimate} with error {error:e}")]
    QuadratureDiverged { estimate: f64, error: f64 },

    #[error("integrand returned a non-finite value at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("rejection envelope failed audit: probe ratio {observed:e} exceeds bound {bound:e}")]
    EnvelopeAudit { observed: f64, bound: f64 },

    #[error("proposal budget exhausted: {0:?}")]
    BudgetExhausted(RejectionReport),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
