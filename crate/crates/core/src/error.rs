use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("not a partition: {0:?}")]
    NotPartition(Vec<i64>),

    #[error("zero coordinate at position {0}")]
    ZeroCoordinate(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("q-Pochhammer truncation did not reach tolerance {epsilon:e} within {max_terms} factors")]
    TruncationFailure { epsilon: f64, max_terms: usize },

    #[error("denominator factor vanishes at a torus point ({0})")]
    DivergentFactor(String),

    #[error("weight value has imaginary residue {imag:e} against magnitude {value:e}")]
    NonRealResult { value: f64, imag: f64 },

    #[error("parameters outside the admissible regime: {0}")]
    OutOfRegime(String),

    #[error("quadrature did not converge after {doublings} doublings (last change {last_change:e})")]
    NoConvergence { doublings: usize, last_change: f64 },

    #[error("Gram matrix is singular or ill-conditioned (condition number {condition:e})")]
    SingularGram { condition: f64 },

    #[error("module relation {relation} violated by {residual:e}")]
    RelationViolation { relation: &'static str, residual: f64 },

    #[error("conjugating element is numerically singular (condition number {condition:e})")]
    SingularConjugator { condition: f64 },

    #[error("no eigenvalue within {tol:e} of {target}")]
    EigenvalueNotFound { target: f64, tol: f64 },

    #[error("restricted spherical function vanishes identically")]
    ZeroFunction,

    #[error("{0} is not representable in this precision mode")]
    NotRepresentable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag, used in CLI reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RankMismatch { .. } => "RankMismatch",
            Error::NotPartition(_) => "NotPartition",
            Error::ZeroCoordinate(_) => "ZeroCoordinate",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::TruncationFailure { .. } => "TruncationFailure",
            Error::DivergentFactor(_) => "DivergentFactor",
            Error::NonRealResult { .. } => "NonRealResult",
            Error::OutOfRegime(_) => "OutOfRegime",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularGram { .. } => "SingularGram",
            Error::RelationViolation { .. } => "RelationViolation",
            Error::SingularConjugator { .. } => "SingularConjugator",
            Error::EigenvalueNotFound { .. } => "EigenvalueNotFound",
            Error::ZeroFunction => "ZeroFunction",
            Error::NotRepresentable(_) => "NotRepresentable",
        }
    }
}
