use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rate is not finite at t = {t}")]
    NonFiniteRate { t: f64 },

    /// The Jaynes-Cummings rate diverges here; `sign` is the sign of the divergence
    /// as t approaches the pole from below.
    #[error("rate pole at t = {t} (diverges to {sign}inf)")]
    RatePole { t: f64, sign: char },

    #[error("step size too large: Richardson estimate {estimate:.3e} with {steps} steps")]
    StepSizeTooLarge { estimate: f64, steps: usize },

    #[error("state left the Bloch ball at t = {t}: |r| = {norm}")]
    StateDrift { t: f64, norm: f64 },

    #[error("BLP pair must consist of two distinct states")]
    IdenticalPair,

    #[error("no closed-form ratio for class {0}")]
    NoClosedForm(String),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
}
