use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::ObsMode;
use crate::error::HrapError;

/// Problem dimensions and sampling bounds for one instance family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HrapConfig {
    pub num_officers: usize,
    pub num_events: usize,
    pub num_tasks: usize,
    /// Inclusive lower bound for sampled capability and travel times, minutes.
    pub value_lo: u32,
    /// Inclusive upper bound; also the scale that maps raw values into [0, 1].
    pub value_hi: u32,
    pub seed: u64,
}

impl Default for HrapConfig {
    fn default() -> Self {
        Self {
            num_officers: 3,
            num_events: 2,
            num_tasks: 2,
            value_lo: 1,
            value_hi: 20,
            seed: 0,
        }
    }
}

impl HrapConfig {
    pub fn validate(&self) -> Result<(), HrapError> {
        if self.num_officers == 0 || self.num_events == 0 || self.num_tasks == 0 {
            return Err(HrapError::InvalidConfig(
                "officer, event and task counts must all be at least 1".into(),
            ));
        }
        if self.value_lo == 0 || self.value_lo > self.value_hi {
            return Err(HrapError::InvalidConfig(format!(
                "need 1 <= value_lo <= value_hi, got [{}, {}]",
                self.value_lo, self.value_hi
            )));
        }
        Ok(())
    }

    /// Number of (event, task) slots, which is also the episode length.
    pub fn num_slots(&self) -> usize {
        self.num_events * self.num_tasks
    }

    /// Observation width of the raw instance encoding.
    pub fn literal_dim(&self) -> usize {
        let e = self.num_events;
        self.num_officers * e * self.num_tasks + e + (e + 1) * (e + 1)
    }

    pub fn obs_dim(&self, mode: ObsMode) -> usize {
        match mode {
            ObsMode::Literal => self.literal_dim(),
            ObsMode::Augmented => self.literal_dim() + 2 * self.num_slots(),
        }
    }
}

/// One sampled problem: per-officer task durations, event times, travel times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HrapInstance {
    /// `capability[officer][event][task]` is the minutes that officer needs for the task.
    pub capability: Vec<Vec<Vec<u32>>>,
    /// Ascending event times; index i is event i.
    pub event_times: Vec<u32>,
    /// `(num_events + 1)^2` symmetric travel times with zero diagonal; row 0 is the depot.
    pub transition: Vec<Vec<u32>>,
    pub config: HrapConfig,
}

impl HrapInstance {
    pub fn max_capability(&self) -> u32 {
        self.capability
            .iter()
            .flatten()
            .flatten()
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn max_transition(&self) -> u32 {
        self.transition.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Normalization constant: `(max capability + max travel time) * num_slots`.
    ///
    /// Every event total is bounded by psi, so rewards land in [-1, 0].
    pub fn psi(&self) -> u64 {
        let slots = self.config.num_slots() as u64;
        (u64::from(self.max_capability()) + u64::from(self.max_transition())) * slots
    }

    pub fn validate(&self) -> Result<(), HrapError> {
        self.config.validate()?;
        let (o, e, t) = (
            self.config.num_officers,
            self.config.num_events,
            self.config.num_tasks,
        );
        let in_range = |v: u32| v >= self.config.value_lo && v <= self.config.value_hi;
        if self.capability.len() != o
            || self.capability.iter().any(|pe| pe.len() != e)
            || self.capability.iter().flatten().any(|pt| pt.len() != t)
        {
            return Err(HrapError::InvalidConfig("capability shape mismatch".into()));
        }
        if !self.capability.iter().flatten().flatten().all(|&v| in_range(v)) {
            return Err(HrapError::InvalidConfig("capability value out of range".into()));
        }
        if self.event_times.len() != e || self.event_times.windows(2).any(|w| w[0] > w[1]) {
            return Err(HrapError::InvalidConfig("event times not ascending".into()));
        }
        if !self.event_times.iter().all(|&v| in_range(v)) {
            return Err(HrapError::InvalidConfig("event time out of range".into()));
        }
        let n = e + 1;
        if self.transition.len() != n || self.transition.iter().any(|row| row.len() != n) {
            return Err(HrapError::InvalidConfig("transition shape mismatch".into()));
        }
        for i in 0..n {
            if self.transition[i][i] != 0 {
                return Err(HrapError::InvalidConfig("transition diagonal must be zero".into()));
            }
            for j in 0..n {
                if self.transition[i][j] != self.transition[j][i] {
                    return Err(HrapError::InvalidConfig("transition must be symmetric".into()));
                }
                if i != j && !in_range(self.transition[i][j]) {
                    return Err(HrapError::InvalidConfig("transition value out of range".into()));
                }
            }
        }
        Ok(())
    }
}

/// Samples an instance from `config.seed`.
pub fn generate_instance(config: &HrapConfig) -> Result<HrapInstance, HrapError> {
    generate_with_seed(config, config.seed)
}

/// Samples an instance from an explicit seed, e.g. one drawn per episode.
pub fn generate_with_seed(config: &HrapConfig, seed: u64) -> Result<HrapInstance, HrapError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = config.value_lo;
    let hi = config.value_hi;
    let draw = |rng: &mut ChaCha8Rng| rng.gen_range(lo..=hi);

    let capability = (0..config.num_officers)
        .map(|_| {
            (0..config.num_events)
                .map(|_| (0..config.num_tasks).map(|_| draw(&mut rng)).collect())
                .collect()
        })
        .collect();

    let mut event_times: Vec<u32> = (0..config.num_events).map(|_| draw(&mut rng)).collect();
    event_times.sort_unstable();

    let n = config.num_events + 1;
    let mut transition = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = draw(&mut rng);
            transition[i][j] = v;
            transition[j][i] = v;
        }
    }

    let instance = HrapInstance {
        capability,
        event_times,
        transition,
        config: config.clone(),
    };
    debug_assert!(instance.validate().is_ok());
    Ok(instance)
}
