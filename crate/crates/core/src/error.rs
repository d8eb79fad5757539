use thiserror::Error;

/// Errors raised by the curvature, certification and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is singular or numerically non-invertible")]
    Singular,

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("bracket is not antisymmetric (max defect {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("bracket violates the Jacobi identity (residual {0:.3e})")]
    NotLie(f64),

    #[error("bracket is not nilpotent: descending central series stalls at dimension {0}")]
    NotNilpotent(usize),

    #[error("operator is not a derivation of the bracket (residual {0:.3e})")]
    NotDerivation(f64),

    #[error("operator is not normal (|[A,A^t]| = {0:.3e})")]
    NotNormal(f64),

    #[error("operators do not commute (residual {0:.3e})")]
    NotCommuting(f64),

    #[error("operators are linearly dependent")]
    LinearlyDependent,

    #[error("entry is not finite")]
    NonFinite,

    #[error("flat metric: F undefined")]
    Flat,

    #[error("nilradical is abelian; use the abelian-nilradical data instead")]
    FlatNilradical,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
