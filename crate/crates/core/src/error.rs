use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid coupling policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("non-finite cavity amplitude at step {step} (t = {t}): a = {a}")]
    NonFinite { step: usize, t: f64, a: f64 },

    #[error("delay {delay} plus pulse support {support} exceeds horizon {t_end}")]
    DelayExceedsHorizon { delay: f64, support: f64, t_end: f64 },

    #[error("no perfect-capture delay exists: {0}")]
    Infeasible(String),

    #[error("{quantity} = {value} lies outside [0, 1]")]
    EfficiencyOutOfRange { quantity: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
