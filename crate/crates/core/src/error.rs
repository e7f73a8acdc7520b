use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero vector cannot be normalized")]
    ZeroNorm,

    /// A closed form divides by a quantity that vanished.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("precondition violated: {what} (got {value:e})")]
    Precondition { what: &'static str, value: f64 },

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("endpoint mismatch: fidelity {0} between path endpoints")]
    EndpointMismatch(f64),

    #[error("integrator resolution too low: {0}")]
    StepCountTooLow(String),

    #[error("finite-difference estimate did not converge: {0}")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
