use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::HrapError;
use crate::instance::{generate_with_seed, HrapConfig, HrapInstance};
use crate::schedule::partial_makespan;

/// Observation layout handed to the agent.
///
/// `Literal` is the raw instance (capabilities, event times, travel times) scaled by
/// `1 / value_hi`. `Augmented` appends a one-hot marker of the slot to fill next and
/// the running assignment vector scaled into `[0, 1]`, and is the training default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObsMode {
    Literal,
    Augmented,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    /// Makespan of the partial schedule after this step, in minutes.
    pub partial_makespan: u64,
    /// How much this assignment grew the partial makespan.
    pub makespan_delta: u64,
}

/// Episode state: the sampled instance plus the slots assigned so far.
///
/// Slot `k` addresses event `k / num_tasks`, task `k % num_tasks`; events are stored
/// in ascending event-time order, so slot order follows the timeline.
#[derive(Debug, Clone)]
pub struct AssignmentState {
    instance: Arc<HrapInstance>,
    slot: usize,
    assignment: Vec<Option<usize>>,
    partial_makespan: u64,
}

impl AssignmentState {
    pub fn new(instance: Arc<HrapInstance>) -> Self {
        let slots = instance.config.num_slots();
        Self {
            instance,
            slot: 0,
            assignment: vec![None; slots],
            partial_makespan: 0,
        }
    }

    pub fn instance(&self) -> &HrapInstance {
        &self.instance
    }

    /// Index of the next slot to fill; equals the number of completed steps.
    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    /// Completed assignment, available once the episode is done.
    pub fn full_assignment(&self) -> Result<Vec<usize>, HrapError> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(slot, entry)| entry.ok_or(HrapError::UnassignedSlot { slot }))
            .collect()
    }

    pub fn is_done(&self) -> bool {
        self.slot == self.instance.config.num_slots()
    }

    /// `(event, task)` addressed by the next slot, or `None` when done.
    pub fn current_event_task(&self) -> Option<(usize, usize)> {
        if self.is_done() {
            None
        } else {
            let t = self.instance.config.num_tasks;
            Some((self.slot / t, self.slot % t))
        }
    }
}

/// Encodes a state for the given observation mode.
pub fn encode_state(state: &AssignmentState, mode: ObsMode) -> Vec<f64> {
    let instance = state.instance();
    let cfg = &instance.config;
    let scale = 1.0 / f64::from(cfg.value_hi);

    let mut obs = Vec::with_capacity(cfg.obs_dim(mode));
    for per_officer in &instance.capability {
        for per_event in per_officer {
            for &v in per_event {
                obs.push(f64::from(v) * scale);
            }
        }
    }
    for &v in &instance.event_times {
        obs.push(f64::from(v) * scale);
    }
    for row in &instance.transition {
        for &v in row {
            obs.push(f64::from(v) * scale);
        }
    }

    if mode == ObsMode::Augmented {
        let slots = cfg.num_slots();
        for k in 0..slots {
            obs.push(if !state.is_done() && k == state.slot { 1.0 } else { 0.0 });
        }
        // Unassigned is 0; officer o is (o + 1) / num_officers.
        let officer_scale = 1.0 / cfg.num_officers as f64;
        for entry in &state.assignment {
            obs.push(entry.map_or(0.0, |o| (o + 1) as f64 * officer_scale));
        }
    }
    obs
}

/// Episode driver for one config and observation mode.
pub struct HrapEnv {
    config: HrapConfig,
    mode: ObsMode,
}

impl HrapEnv {
    pub fn new(config: HrapConfig, mode: ObsMode) -> Result<Self, HrapError> {
        config.validate()?;
        Ok(Self { config, mode })
    }

    pub fn config(&self) -> &HrapConfig {
        &self.config
    }

    pub fn mode(&self) -> ObsMode {
        self.mode
    }

    pub fn num_actions(&self) -> usize {
        self.config.num_officers
    }

    pub fn obs_dim(&self) -> usize {
        self.config.obs_dim(self.mode)
    }

    /// Starts an episode on a fresh instance sampled from `episode_seed`.
    pub fn reset(&self, episode_seed: u64) -> (AssignmentState, Vec<f64>) {
        let instance = generate_with_seed(&self.config, episode_seed)
            .expect("config validated in HrapEnv::new");
        self.reset_with_instance(Arc::new(instance))
    }

    /// Starts an episode on a caller-provided instance.
    pub fn reset_with_instance(&self, instance: Arc<HrapInstance>) -> (AssignmentState, Vec<f64>) {
        let state = AssignmentState::new(instance);
        let obs = encode_state(&state, self.mode);
        (state, obs)
    }

    /// Assigns `officer` to the current slot.
    ///
    /// The reward is `-(partial makespan) / psi`, so it sits in `[-1, 0]` and the
    /// final step's reward reflects the complete schedule.
    pub fn step(&self, state: &mut AssignmentState, officer: usize) -> Result<StepOutcome, HrapError> {
        if state.is_done() {
            return Err(HrapError::EpisodeFinished);
        }
        if officer >= self.config.num_officers {
            return Err(HrapError::InvalidAction {
                officer,
                num_officers: self.config.num_officers,
            });
        }
        state.assignment[state.slot] = Some(officer);
        state.slot += 1;

        let pm = partial_makespan(state.instance(), &state.assignment)?;
        let delta = pm - state.partial_makespan;
        state.partial_makespan = pm;
        let reward = -(pm as f64) / (state.instance().psi() as f64);

        Ok(StepOutcome {
            observation: encode_state(state, self.mode),
            reward,
            done: state.is_done(),
            partial_makespan: pm,
            makespan_delta: delta,
        })
    }
}
