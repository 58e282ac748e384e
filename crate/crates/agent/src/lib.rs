//! Value-based learner for the allocation environment.
//!
//! The training loop is epsilon-greedy over a (possibly noisy) Q-network,
//! with prioritized replay of aggregated n-step transitions, double-DQN
//! bootstrap targets, gradient clipping, Adam, and periodic target-network
//! synchronization. Everything is seeded through explicit ChaCha streams, so
//! a full run is a pure function of its seeds.

mod agent;
mod checkpoint;
mod error;
mod nstep;
mod replay;
mod sumtree;

pub use agent::{
    evaluate_network, project_distribution, Agent, AgentConfig, AgentSeeds, BetaSchedule,
    EvalOutcome,
};
pub use checkpoint::{Checkpoint, RngState};
pub use error::AgentError;
pub use nstep::{aggregate_window, argmax_lowest, bootstrap_target, n_step_return, NStepBuilder, Transition};
pub use replay::{NStepTransition, PrioritizedReplay};
