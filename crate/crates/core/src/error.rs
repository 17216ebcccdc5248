use thiserror::Error;

/// Failures shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} lies outside the retained branches")]
    Truncation(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("no root in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("orbit left the trapping interval at step {step} (x = {x})")]
    Escape { step: usize, x: f64 },
    #[error("trapping check failed: worst exit {exit:.3e}; {hint}")]
    Trapping { exit: f64, hint: String },
    #[error("not hyperbolic at tolerance: {0}")]
    NonHyperbolic(String),
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
