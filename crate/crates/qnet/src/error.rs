use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Circuit(#[from] qcircuit::CircuitError),
    #[error("observation has {got} entries, network expects {expected}")]
    InputDim { got: usize, expected: usize },
    #[error("batch fields disagree on length: {0}")]
    BatchShape(String),
    #[error("loss is not finite: {0}")]
    NonFiniteLoss(f64),
    #[error("operation needs a distributional network")]
    NotDistributional,
    #[error("categorical loss needs a projected target distribution")]
    MissingTargetDistribution,
}
