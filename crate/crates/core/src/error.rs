use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A control function returned a non-finite value.
    #[error("control {index} evaluated to {value} at t = {t}")]
    ControlEvaluation { index: usize, t: f64, value: f64 },

    /// The adiabatic frame is undefined where detuning and coupling both vanish.
    #[error("degenerate point (detuning, coupling) = (0, 0) at s = {s}")]
    DegeneratePoint { s: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
