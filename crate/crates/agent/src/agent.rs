use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use hrap_env::{run_episode, HrapEnv};
use qnet::{Adam, AdamHyper, BatchTargets, LossKind, Mode, Network, TrainOutput};

use crate::error::AgentError;
use crate::nstep::{argmax_lowest, NStepBuilder, Transition};
use crate::replay::PrioritizedReplay;

/// Linear anneal for the importance-sampling exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSchedule {
    pub start: f64,
    pub end: f64,
    pub anneal_steps: u64,
}

impl BetaSchedule {
    pub fn value(&self, train_steps: u64) -> f64 {
        let frac = (train_steps as f64 / self.anneal_steps.max(1) as f64).min(1.0);
        self.start + (self.end - self.start) * frac
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub gamma: f64,
    pub n_step: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub target_sync_every: u64,
    pub epsilon_start: f64,
    pub epsilon_decay: f64,
    pub epsilon_min: f64,
    pub clip_norm: f64,
    pub capacity: usize,
    pub alpha: f64,
    pub eps_priority: f64,
    /// Stored transitions required before training starts.
    pub warmup: usize,
    /// Train once every this many environment steps (after warmup).
    pub train_every: u64,
    pub loss: LossKind,
    /// Importance-sampling correction; off unless set.
    pub is_beta: Option<BetaSchedule>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            n_step: 3,
            learning_rate: 1e-4,
            batch_size: 64,
            target_sync_every: 1000,
            epsilon_start: 1.0,
            epsilon_decay: 0.9995,
            epsilon_min: 0.05,
            clip_norm: 10.0,
            capacity: 100_000,
            alpha: 0.6,
            eps_priority: 1e-6,
            warmup: 1000,
            train_every: 1,
            loss: LossKind::SquaredTd,
            is_beta: None,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(AgentError::InvalidConfig("gamma must be in (0, 1]".into()));
        }
        if self.n_step < 1 {
            return Err(AgentError::InvalidConfig("n_step must be >= 1".into()));
        }
        if self.epsilon_min > self.epsilon_start {
            return Err(AgentError::InvalidConfig(
                "epsilon_min must not exceed epsilon_start".into(),
            ));
        }
        if self.batch_size == 0 || self.capacity < self.batch_size {
            return Err(AgentError::InvalidConfig(
                "capacity must hold at least one batch".into(),
            ));
        }
        if self.eps_priority <= 0.0 {
            return Err(AgentError::InvalidConfig(
                "priority floor must be positive".into(),
            ));
        }
        if self.warmup < self.batch_size {
            return Err(AgentError::InvalidConfig(
                "warmup must cover at least one batch".into(),
            ));
        }
        Ok(())
    }
}

/// Independent random streams the agent consumes.
#[derive(Debug, Clone, Copy)]
pub struct AgentSeeds {
    pub noise: u64,
    pub action: u64,
    pub replay: u64,
}

#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub mean_reward: f64,
    pub per_episode: Vec<f64>,
}

/// Greedy eval-mode rollout of a network over explicit instance seeds.
pub fn evaluate_network(
    net: &Network,
    env: &HrapEnv,
    instance_seeds: &[u64],
) -> Result<EvalOutcome, AgentError> {
    let mut per_episode = Vec::with_capacity(instance_seeds.len());
    for &seed in instance_seeds {
        let mut net_err = None;
        let outcome = run_episode(env, seed, |obs, _| match net.q_values(obs, Mode::Eval) {
            Ok(q) => argmax_lowest(&q),
            Err(e) => {
                net_err.get_or_insert(e);
                0
            }
        })?;
        if let Some(e) = net_err {
            return Err(e.into());
        }
        per_episode.push(outcome.final_reward);
    }
    let mean_reward = per_episode.iter().sum::<f64>() / per_episode.len().max(1) as f64;
    Ok(EvalOutcome {
        mean_reward,
        per_episode,
    })
}

/// Rainbow-style learner: epsilon-greedy over the (noisy) main network,
/// prioritized replay of aggregated n-step items, double-DQN bootstrap
/// targets, clipped gradients, and periodic target sync.
pub struct Agent {
    config: AgentConfig,
    main: Network,
    target: Network,
    opt: Adam,
    replay: PrioritizedReplay,
    builder: NStepBuilder,
    epsilon: f64,
    env_steps: u64,
    train_steps: u64,
    episodes: u64,
    pub(crate) rng_noise: ChaCha8Rng,
    pub(crate) rng_action: ChaCha8Rng,
    pub(crate) rng_replay: ChaCha8Rng,
}

impl Agent {
    pub fn new(network: Network, config: AgentConfig, seeds: AgentSeeds) -> Result<Self, AgentError> {
        config.validate()?;
        let target = network.clone();
        let opt = Adam::new(AdamHyper {
            lr: config.learning_rate,
            ..AdamHyper::default()
        });
        let replay = PrioritizedReplay::new(config.capacity, config.alpha, config.eps_priority);
        let builder = NStepBuilder::new(config.n_step, config.gamma);
        Ok(Self {
            epsilon: config.epsilon_start,
            builder,
            replay,
            opt,
            target,
            main: network,
            config,
            env_steps: 0,
            train_steps: 0,
            episodes: 0,
            rng_noise: ChaCha8Rng::seed_from_u64(seeds.noise),
            rng_action: ChaCha8Rng::seed_from_u64(seeds.action),
            rng_replay: ChaCha8Rng::seed_from_u64(seeds.replay),
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn main(&self) -> &Network {
        &self.main
    }

    pub fn target(&self) -> &Network {
        &self.target
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn train_steps(&self) -> u64 {
        self.train_steps
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn replay_len(&self) -> usize {
        self.replay.len()
    }

    pub fn replay(&self) -> &PrioritizedReplay {
        &self.replay
    }

    pub fn optimizer_steps(&self) -> u64 {
        self.opt.steps()
    }

    /// Epsilon-greedy over train-mode Q-values; ties go to the lowest index.
    pub fn select_action(&mut self, obs: &[f64]) -> Result<usize, AgentError> {
        let actions = self.main.num_actions();
        if self.rng_action.gen::<f64>() < self.epsilon {
            return Ok(self.rng_action.gen_range(0..actions));
        }
        Ok(argmax_lowest(&self.main.q_values(obs, Mode::Train)?))
    }

    /// Feeds one environment step; trains when the buffer is warm and the
    /// step counter lines up.
    pub fn observe(&mut self, transition: Transition) -> Result<Option<TrainOutput>, AgentError> {
        for item in self.builder.push(transition) {
            self.replay.push(item);
        }
        self.env_steps += 1;
        if self.replay.len() >= self.config.warmup && self.env_steps % self.config.train_every == 0
        {
            return self.train_step().map(Some);
        }
        Ok(None)
    }

    /// One gradient update: fresh noise, prioritized batch, n-step double-DQN
    /// targets, clipped Adam step, priority refresh, periodic target sync.
    pub fn train_step(&mut self) -> Result<TrainOutput, AgentError> {
        self.main.resample_noise(&mut self.rng_noise);
        let indices = self
            .replay
            .sample(self.config.batch_size, &mut self.rng_replay)
            .ok_or(AgentError::NotReady)?;
        let b = indices.len();
        let dim = self.main.input_dim();

        let mut x = Array2::zeros((b, dim));
        let mut x_boot = Array2::zeros((b, dim));
        let mut actions = Vec::with_capacity(b);
        let mut reward_sums = Vec::with_capacity(b);
        let mut discounts = Vec::with_capacity(b);
        for (row, &i) in indices.iter().enumerate() {
            let item = self.replay.get(i);
            for (c, &v) in item.state.iter().enumerate() {
                x[(row, c)] = v;
            }
            for (c, &v) in item.boot_state.iter().enumerate() {
                x_boot[(row, c)] = v;
            }
            actions.push(item.action);
            reward_sums.push(item.reward_sum);
            discounts.push(if item.terminal {
                0.0
            } else {
                self.config.gamma.powi(item.steps as i32)
            });
        }

        // Double DQN: action choice from the main net, value from the target net.
        let q_main_boot = self.main.q_batch(x_boot.view(), Mode::Train)?;
        let a_star: Vec<usize> = q_main_boot
            .rows()
            .into_iter()
            .map(|r| argmax_lowest(r.as_slice().unwrap()))
            .collect();
        let q_target_boot = self.target.q_batch(x_boot.view(), Mode::Eval)?;
        let returns: Vec<f64> = (0..b)
            .map(|i| reward_sums[i] + discounts[i] * q_target_boot[(i, a_star[i])])
            .collect();

        let target_dist = match self.config.loss {
            LossKind::SquaredTd => None,
            LossKind::CategoricalCe => {
                let support = self.main.support().ok_or(qnet::NetError::NotDistributional)?;
                let support = support.to_vec();
                let rows = self.target.dist_rows(x_boot.view(), &a_star, Mode::Eval)?;
                let mut m = Array2::zeros((b, support.len()));
                for i in 0..b {
                    let projected =
                        project_distribution(&support, rows.row(i).as_slice().unwrap(), reward_sums[i], discounts[i]);
                    for (j, p) in projected.into_iter().enumerate() {
                        m[(i, j)] = p;
                    }
                }
                Some(m)
            }
        };

        let weights = self
            .config
            .is_beta
            .map(|sched| self.replay.is_weights(&indices, sched.value(self.train_steps)));

        let targets = BatchTargets {
            actions: &actions,
            returns: &returns,
            target_dist: target_dist.as_ref().map(|m| m.view()),
            weights: weights.as_deref(),
        };
        let out = self.main.train_on_batch(
            x.view(),
            &targets,
            self.config.loss,
            &mut self.opt,
            self.config.clip_norm,
        )?;

        for (&i, &delta) in indices.iter().zip(&out.td_errors) {
            self.replay.update_priority(i, delta);
        }
        self.train_steps += 1;
        if self.train_steps % self.config.target_sync_every == 0 {
            self.sync_target();
        }
        Ok(out)
    }

    /// Copies the main network into the target network verbatim.
    pub fn sync_target(&mut self) {
        self.target = self.main.clone();
    }

    /// `epsilon <- max(epsilon * decay, epsilon_min)`, once per finished episode.
    pub fn end_episode(&mut self) {
        self.episodes += 1;
        self.epsilon = (self.epsilon * self.config.epsilon_decay).max(self.config.epsilon_min);
    }

    /// Greedy eval-mode performance of the current main network.
    pub fn evaluate(&self, env: &HrapEnv, instance_seeds: &[u64]) -> Result<EvalOutcome, AgentError> {
        evaluate_network(&self.main, env, instance_seeds)
    }

    pub(crate) fn from_parts(
        config: AgentConfig,
        main: Network,
        target: Network,
        opt: Adam,
        epsilon: f64,
        env_steps: u64,
        train_steps: u64,
        episodes: u64,
        rngs: (ChaCha8Rng, ChaCha8Rng, ChaCha8Rng),
    ) -> Result<Self, AgentError> {
        config.validate()?;
        Ok(Self {
            replay: PrioritizedReplay::new(config.capacity, config.alpha, config.eps_priority),
            builder: NStepBuilder::new(config.n_step, config.gamma),
            main,
            target,
            opt,
            epsilon,
            env_steps,
            train_steps,
            episodes,
            rng_noise: rngs.0,
            rng_action: rngs.1,
            rng_replay: rngs.2,
            config,
        })
    }

    pub(crate) fn parts(&self) -> (&Network, &Adam, f64, u64, u64, u64) {
        (
            &self.main,
            &self.opt,
            self.epsilon,
            self.env_steps,
            self.train_steps,
            self.episodes,
        )
    }
}

/// Projects `shift + scale * z_j` with mass `probs[j]` back onto the support
/// (clamped at the edges). `scale = 0` collapses to a point mass at `shift`.
pub fn project_distribution(support: &[f64], probs: &[f64], shift: f64, scale: f64) -> Vec<f64> {
    let n = support.len();
    let v_min = support[0];
    let v_max = support[n - 1];
    let dz = (v_max - v_min) / (n - 1) as f64;
    let mut m = vec![0.0; n];
    for (j, &p) in probs.iter().enumerate() {
        let t = (shift + scale * support[j]).clamp(v_min, v_max);
        let pos = ((t - v_min) / dz).min((n - 1) as f64);
        let l = pos.floor() as usize;
        let u = pos.ceil() as usize;
        if l == u {
            m[l] += p;
        } else {
            m[l] += p * (u as f64 - pos);
            m[u] += p * (pos - l as f64);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_decay_is_the_exact_recurrence() {
        let net = Network::Scalar(qnet::DdqnNet::new(4, 2, [8, 8], 1).unwrap());
        let mut cfg = AgentConfig {
            epsilon_start: 1.0,
            epsilon_decay: 0.5,
            epsilon_min: 0.2,
            ..AgentConfig::default()
        };
        cfg.warmup = cfg.batch_size;
        let mut agent = Agent::new(
            net,
            cfg,
            AgentSeeds {
                noise: 1,
                action: 2,
                replay: 3,
            },
        )
        .unwrap();
        agent.end_episode();
        assert_eq!(agent.epsilon(), 0.5);
        agent.end_episode();
        assert_eq!(agent.epsilon(), 0.25);
        agent.end_episode();
        assert_eq!(agent.epsilon(), 0.2);
        agent.end_episode();
        assert_eq!(agent.epsilon(), 0.2);
    }

    #[test]
    fn projection_point_mass_lands_on_neighboring_atoms() {
        let support = vec![-1.0, -0.5, 0.0];
        // Terminal item: all mass at -0.75, split between atoms 0 and 1.
        let m = project_distribution(&support, &[0.2, 0.3, 0.5], -0.75, 0.0);
        assert!((m[0] - 0.5).abs() < 1e-12);
        assert!((m[1] - 0.5).abs() < 1e-12);
        assert_eq!(m[2], 0.0);
    }

    #[test]
    fn projection_clamps_out_of_range_mass_to_the_edges() {
        let support = vec![-1.0, -0.5, 0.0];
        let m = project_distribution(&support, &[1.0, 0.0, 0.0], -3.0, 1.0);
        assert!((m[0] - 1.0).abs() < 1e-12);
        let m = project_distribution(&support, &[0.0, 0.0, 1.0], 0.7, 1.0);
        assert!((m[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_preserves_total_mass() {
        let support: Vec<f64> = (0..51).map(|j| -1.0 + j as f64 / 50.0).collect();
        let probs: Vec<f64> = {
            let raw: Vec<f64> = (0..51).map(|j| ((j * 7 + 3) % 11) as f64 + 0.5).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        };
        for (shift, scale) in [(-0.3, 0.9409), (-0.9, 0.97), (0.0, 1.0), (-1.7, 0.5)] {
            let m = project_distribution(&support, &probs, shift, scale);
            let total: f64 = m.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "shift {shift} scale {scale}");
            assert!(m.iter().all(|&v| v >= 0.0));
        }
    }
}
