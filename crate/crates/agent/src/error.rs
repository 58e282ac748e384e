use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Net(#[from] qnet::NetError),
    #[error(transparent)]
    Env(#[from] hrap_env::HrapError),
    #[error("replay buffer has fewer items than one batch")]
    NotReady,
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Serde(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
