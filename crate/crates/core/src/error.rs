//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max entrywise deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    NotUnitTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("iteration failed to converge in {what} (residual {residual:.3e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("qubit count must be at least 1")]
    ZeroQubits,

    #[error("qubit count {0} is too large to index parameters")]
    TooManyQubits(usize),

    #[error("parameter vector must not be identically zero")]
    ZeroParameters,

    #[error("parameter vector has length {got}, expected {expected}")]
    BadParameterCount { expected: usize, got: usize },

    #[error("form {form} is only defined for a single qubit (got n = {n_qubits})")]
    FormArityMismatch {
        form: crate::forms::FormId,
        n_qubits: usize,
    },

    #[error("form {0} has no explicit closed-form density")]
    NoClosedForm(crate::forms::FormId),

    #[error("form {0} is not a triangular multiqubit layout")]
    NotMultiqubitForm(crate::forms::FormId),

    #[error("{0} requires single-qubit data")]
    SingleQubitOnly(&'static str),

    #[error("Stokes vector lies outside the unit ball (|s|^2 = {0})")]
    UnphysicalStokes(f64),

    #[error("unknown measurement setting `{0}`")]
    UnknownSetting(String),

    #[error("setting `{0}` is missing from the measurement set")]
    MissingSetting(String),

    #[error("setting `{0}` appears more than once")]
    DuplicateSetting(String),

    #[error("count {count} exceeds shots {shots} for setting `{setting}`")]
    CountExceedsShots {
        setting: String,
        count: f64,
        shots: u64,
    },

    #[error("negative count {count} for setting `{setting}`")]
    NegativeCount { setting: String, count: f64 },

    #[error("shots must be positive (setting `{0}`)")]
    ZeroShots(String),

    #[error("objective is not finite at t = {params:?}")]
    NonFiniteObjective { params: Vec<f64> },

    #[error("triangular factorization failed (pivot {0:.3e}) after regularization; this indicates a bug")]
    FactorizationFailed(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
