use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("checkpoint does not match config: {0}")]
    Schema(String),
    #[error(transparent)]
    Env(#[from] hrap_env::HrapError),
    #[error(transparent)]
    Net(#[from] qnet::NetError),
    #[error(transparent)]
    Agent(#[from] agent::AgentError),
    #[error(transparent)]
    Metrics(#[from] circuit_metrics::MetricsError),
    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
