use thiserror::Error;

#[derive(Debug, Error)]
pub enum HrapError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("episode already finished")]
    EpisodeFinished,
    #[error("officer index {officer} out of range for {num_officers} officers")]
    InvalidAction { officer: usize, num_officers: usize },
    #[error("assignment has {got} slots, instance expects {expected}")]
    AssignmentLength { got: usize, expected: usize },
    #[error("assignment is missing an officer in slot {slot}")]
    UnassignedSlot { slot: usize },
    #[error("search space of {size} assignments exceeds the brute-force cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
}
