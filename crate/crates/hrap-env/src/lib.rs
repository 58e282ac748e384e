//! Officer-to-task assignment environment for timed events.
//!
//! An instance places `num_officers` officers, `num_events` events (plus a depot
//! everyone starts from) and `num_tasks` tasks per event. An episode walks the
//! `num_events * num_tasks` slots in a fixed order and assigns one officer per slot;
//! the reward after every step is the negated makespan of the partial schedule,
//! normalized into `[-1, 0]` by the instance constant psi.
//!
//! The crate also ships the exhaustive schedule oracle ([`brute_force_best`]) and a
//! uniform-random baseline used to normalize learning results.

mod env;
mod error;
mod instance;
mod rollout;
mod schedule;
pub mod seeds;

pub use env::{encode_state, AssignmentState, HrapEnv, ObsMode, StepOutcome};
pub use error::HrapError;
pub use instance::{generate_instance, generate_with_seed, HrapConfig, HrapInstance};
pub use rollout::{random_baseline, random_baseline_on_seeds, run_episode, BaselineReport, EpisodeOutcome};
pub use schedule::{brute_force_best, makespan, partial_makespan, BRUTE_FORCE_CAP};
