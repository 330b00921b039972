use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sigma = {sigma} is outside the attainable range [0, {max})")]
    OutsideHorizon { sigma: f64, max: f64 },

    #[error("non-local mean of u^r is not positive ({0})")]
    NonPositiveMean(f64),

    #[error("{what} fell to {value} (below positivity floor)")]
    NonPositive { what: &'static str, value: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("time step underflow at clock {clock} (sup norm {sup}): the clock no longer advances")]
    StepUnderflow { clock: f64, sup: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("fit failed: {0}")]
    NoFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
