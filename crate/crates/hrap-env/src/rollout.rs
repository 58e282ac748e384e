use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{AssignmentState, HrapEnv, ObsMode};
use crate::error::HrapError;
use crate::instance::HrapConfig;
use crate::seeds::{derive_seed, DOMAIN_BASELINE_ACTION, DOMAIN_BASELINE_INSTANCE};

#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    /// Reward of the last step, i.e. the normalized makespan of the full schedule.
    pub final_reward: f64,
    pub rewards: Vec<f64>,
    pub assignment: Vec<usize>,
}

/// Runs one full episode, asking `policy` for an officer at every slot.
pub fn run_episode<P>(
    env: &HrapEnv,
    instance_seed: u64,
    mut policy: P,
) -> Result<EpisodeOutcome, HrapError>
where
    P: FnMut(&[f64], &AssignmentState) -> usize,
{
    let (mut state, mut obs) = env.reset(instance_seed);
    let mut rewards = Vec::with_capacity(env.config().num_slots());
    while !state.is_done() {
        let action = policy(&obs, &state);
        let out = env.step(&mut state, action)?;
        rewards.push(out.reward);
        obs = out.observation;
    }
    Ok(EpisodeOutcome {
        final_reward: *rewards.last().expect("episodes have at least one slot"),
        rewards,
        assignment: state.full_assignment()?,
    })
}

#[derive(Debug, Clone)]
pub struct BaselineReport {
    pub mean_reward: f64,
    pub per_episode: Vec<f64>,
}

/// Uniform-random policy on instances drawn from explicit per-episode seeds.
///
/// Action randomness is seeded per episode from `(action_seed, episode index)`, so a
/// report is reproducible and independent of evaluation order.
pub fn random_baseline_on_seeds(
    config: &HrapConfig,
    instance_seeds: &[u64],
    action_seed: u64,
) -> Result<BaselineReport, HrapError> {
    let env = HrapEnv::new(config.clone(), ObsMode::Literal)?;
    let mut per_episode = Vec::with_capacity(instance_seeds.len());
    for (i, &instance_seed) in instance_seeds.iter().enumerate() {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(action_seed, DOMAIN_BASELINE_ACTION, i as u64));
        let outcome = run_episode(&env, instance_seed, |_, _| {
            rng.gen_range(0..config.num_officers)
        })?;
        per_episode.push(outcome.final_reward);
    }
    let mean_reward = per_episode.iter().sum::<f64>() / per_episode.len().max(1) as f64;
    Ok(BaselineReport {
        mean_reward,
        per_episode,
    })
}

/// Mean final reward of a uniform-random policy over freshly sampled instances.
pub fn random_baseline(
    config: &HrapConfig,
    episodes: usize,
    seed: u64,
) -> Result<BaselineReport, HrapError> {
    let instance_seeds: Vec<u64> = (0..episodes as u64)
        .map(|i| derive_seed(seed, DOMAIN_BASELINE_INSTANCE, i))
        .collect();
    random_baseline_on_seeds(config, &instance_seeds, seed)
}
