use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate state: squared norm {0:e} is below 1e-12")]
    DegenerateState(f64),
    #[error("degenerate measurement: total outcome probability {0:e} is below 1e-12")]
    DegenerateMeasurement(f64),
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
