use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Circuit(#[from] qcircuit::CircuitError),
    #[error("histogram holds no samples")]
    EmptyHistogram,
    #[error("invalid metrics argument: {0}")]
    InvalidArg(String),
}
