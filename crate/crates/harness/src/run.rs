use std::collections::VecDeque;
use std::fs;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use agent::{Agent, AgentSeeds, Checkpoint, Transition};
use hrap_env::seeds::{
    derive_seed, DOMAIN_AGENT_ACTION, DOMAIN_AGENT_INIT, DOMAIN_AGENT_NOISE, DOMAIN_EVAL,
    DOMAIN_REPLAY_SAMPLE, DOMAIN_TRAIN,
};
use hrap_env::{
    brute_force_best, generate_with_seed, random_baseline, random_baseline_on_seeds, run_episode,
    HrapConfig, HrapEnv, StepOutcome,
};
use qnet::{DdqnNet, Network, QNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Variant};
use crate::error::HarnessError;

pub const CURVE_FILE: &str = "curve.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const SNAPSHOT_FILE: &str = "config.snapshot";
pub const EVAL_FILE: &str = "eval.json";
pub const RUN_FILE: &str = "run.json";

/// Slice of an evaluation small enough to embed in run records and tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalSummary {
    pub mean_reward: f64,
    pub baseline_mean_reward: f64,
    pub reduction_pct: f64,
}

/// Full evaluation report, written to `eval.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub episodes: usize,
    pub mean_reward: f64,
    pub per_episode_rewards: Vec<f64>,
    pub baseline_mean_reward: f64,
    pub reduction_pct: f64,
}

impl EvalReport {
    pub fn summary(&self) -> EvalSummary {
        EvalSummary {
            mean_reward: self.mean_reward,
            baseline_mean_reward: self.baseline_mean_reward,
            reduction_pct: self.reduction_pct,
        }
    }
}

/// What one `train` invocation produced, written to `run.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_snapshot: PathBuf,
    pub curve: PathBuf,
    /// Absent for the random variant, which has nothing to checkpoint.
    pub checkpoint: Option<PathBuf>,
    pub eval: EvalSummary,
    pub wall_clock_secs: f64,
}

/// Makespan reduction relative to the baseline, in percent; positive means
/// the agent beats the baseline. Rewards are negated normalized makespans,
/// so a reward gain is exactly a makespan reduction.
pub fn reduction_pct(agent_mean: f64, baseline_mean: f64) -> f64 {
    if baseline_mean == 0.0 {
        return 0.0;
    }
    (agent_mean - baseline_mean) / baseline_mean.abs() * 100.0
}

/// Held-out instance seeds for evaluation; disjoint from the training stream.
pub fn eval_instance_seeds(master_seed: u64, episodes: usize) -> Vec<u64> {
    (0..episodes as u64)
        .map(|i| derive_seed(master_seed, DOMAIN_EVAL, i))
        .collect()
}

/// Builds the variant's network and agent with all streams derived from the
/// master seed.
pub fn build_agent(config: &ExperimentConfig, env: &HrapEnv) -> Result<Agent, HarnessError> {
    let init_seed = derive_seed(config.master_seed, DOMAIN_AGENT_INIT, 0);
    let network = match config.variant {
        Variant::Random => {
            return Err(HarnessError::Config(
                "the random variant has no agent to build".into(),
            ))
        }
        Variant::Ddqn => Network::Scalar(DdqnNet::new(
            env.obs_dim(),
            env.num_actions(),
            config.network.hidden,
            init_seed,
        )?),
        Variant::Rainbow | Variant::Vqr => {
            let net_config = config.network.to_network_config(
                env.obs_dim(),
                env.num_actions(),
                config.feature_kind(),
            );
            Network::Dist(QNetwork::new(net_config, init_seed)?)
        }
    };
    let seeds = AgentSeeds {
        noise: derive_seed(config.master_seed, DOMAIN_AGENT_NOISE, 0),
        action: derive_seed(config.master_seed, DOMAIN_AGENT_ACTION, 0),
        replay: derive_seed(config.master_seed, DOMAIN_REPLAY_SAMPLE, 0),
    };
    Ok(Agent::new(network, config.agent.clone(), seeds)?)
}

fn load_agent_checked(
    config: &ExperimentConfig,
    checkpoint: &Path,
    env: &HrapEnv,
) -> Result<Agent, HarnessError> {
    let agent = Checkpoint::load(checkpoint)?.into_agent()?;
    let net = agent.main();
    if net.input_dim() != env.obs_dim() || net.num_actions() != env.num_actions() {
        return Err(HarnessError::Schema(format!(
            "network is {}x{} but the environment needs {}x{}",
            net.input_dim(),
            net.num_actions(),
            env.obs_dim(),
            env.num_actions()
        )));
    }
    let distributional = matches!(net, Network::Dist(_));
    let wants_distributional = config.variant != Variant::Ddqn;
    if distributional != wants_distributional {
        return Err(HarnessError::Schema(format!(
            "checkpoint head does not match variant `{}`",
            config.variant
        )));
    }
    Ok(agent)
}

/// Trains per the config, logging one CSV row per episode, checkpointing on
/// the best 100-episode moving average, then evaluating the best checkpoint.
pub fn run_train(config: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord, HarnessError> {
    let started = Instant::now();
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let snapshot_path = out_dir.join(SNAPSHOT_FILE);
    fs::write(&snapshot_path, config.to_toml()?)?;

    let env = HrapEnv::new(config.hrap.clone(), config.obs_mode)?;
    let curve_path = out_dir.join(CURVE_FILE);
    let mut curve = BufWriter::new(File::create(&curve_path)?);
    writeln!(curve, "episode,train_reward,epsilon,loss_mean,steps")?;

    let checkpoint_path = out_dir.join(CHECKPOINT_FILE);
    let mut checkpointed = false;

    if config.variant == Variant::Random {
        let mut steps = 0u64;
        for ep in 0..config.episodes as u64 {
            let instance_seed = derive_seed(config.master_seed, DOMAIN_TRAIN, ep);
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(config.master_seed, DOMAIN_AGENT_ACTION, ep));
            let outcome = run_episode(&env, instance_seed, |_, _| {
                rng.gen_range(0..env.num_actions())
            })?;
            steps += outcome.rewards.len() as u64;
            writeln!(curve, "{ep},{:.6},1.000000,0.000000,{steps}", outcome.final_reward)?;
            curve.flush()?;
        }
    } else {
        let mut agent = build_agent(config, &env)?;
        let mut window = VecDeque::with_capacity(100);
        let mut window_sum = 0.0;
        let mut best_ma = f64::NEG_INFINITY;
        for ep in 0..config.episodes as u64 {
            let instance_seed = derive_seed(config.master_seed, DOMAIN_TRAIN, ep);
            let (mut state, mut obs) = env.reset(instance_seed);
            let mut loss_sum = 0.0;
            let mut loss_count = 0usize;
            let mut final_reward = 0.0;
            while !state.is_done() {
                let action = agent.select_action(&obs)?;
                let StepOutcome {
                    observation: next,
                    reward,
                    done,
                    ..
                } = env.step(&mut state, action)?;
                let trained = agent.observe(Transition {
                    state: obs,
                    action,
                    reward,
                    next_state: next.clone(),
                    done,
                })?;
                if let Some(out) = trained {
                    loss_sum += out.loss;
                    loss_count += 1;
                }
                obs = next;
                final_reward = reward;
            }
            agent.end_episode();
            let loss_mean = if loss_count > 0 {
                loss_sum / loss_count as f64
            } else {
                0.0
            };
            writeln!(
                curve,
                "{ep},{final_reward:.6},{:.6},{loss_mean:.6},{}",
                agent.epsilon(),
                agent.env_steps()
            )?;
            curve.flush()?;

            window.push_back(final_reward);
            window_sum += final_reward;
            if window.len() > 100 {
                window_sum -= window.pop_front().expect("window is non-empty");
            }
            if window.len() == 100 {
                let ma = window_sum / 100.0;
                if ma > best_ma {
                    best_ma = ma;
                    Checkpoint::of(&agent).save(&checkpoint_path)?;
                    checkpointed = true;
                }
            }
        }
        if !checkpointed {
            Checkpoint::of(&agent).save(&checkpoint_path)?;
            checkpointed = true;
        }
    }
    curve.flush()?;
    drop(curve);

    let report = evaluate_run(config, checkpointed.then_some(checkpoint_path.as_path()))?;
    write_json(&out_dir.join(EVAL_FILE), &report)?;

    let record = RunRecord {
        config_snapshot: snapshot_path,
        curve: curve_path,
        checkpoint: checkpointed.then_some(checkpoint_path),
        eval: report.summary(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    write_json(&out_dir.join(RUN_FILE), &record)?;
    Ok(record)
}

/// Evaluates a checkpoint on the held-out seed stream and writes `eval.json`.
pub fn run_eval(
    config: &ExperimentConfig,
    checkpoint: Option<&Path>,
    out_dir: &Path,
) -> Result<EvalReport, HarnessError> {
    let report = evaluate_run(config, checkpoint)?;
    fs::create_dir_all(out_dir)?;
    write_json(&out_dir.join(EVAL_FILE), &report)?;
    Ok(report)
}

/// Greedy evaluation against a random baseline run on the identical instance
/// seeds; the random variant is the baseline, so its reduction is exactly 0.
fn evaluate_run(
    config: &ExperimentConfig,
    checkpoint: Option<&Path>,
) -> Result<EvalReport, HarnessError> {
    let env = HrapEnv::new(config.hrap.clone(), config.obs_mode)?;
    let seeds = eval_instance_seeds(config.master_seed, config.eval_episodes);
    let baseline = random_baseline_on_seeds(&config.hrap, &seeds, config.master_seed)?;
    let (mean_reward, per_episode_rewards) = if config.variant == Variant::Random {
        (baseline.mean_reward, baseline.per_episode.clone())
    } else {
        let path = checkpoint.ok_or_else(|| {
            HarnessError::Config(format!(
                "variant `{}` needs a checkpoint to evaluate",
                config.variant
            ))
        })?;
        let agent = load_agent_checked(config, path, &env)?;
        let outcome = agent.evaluate(&env, &seeds)?;
        (outcome.mean_reward, outcome.per_episode)
    };
    Ok(EvalReport {
        config: config.clone(),
        seed: config.master_seed,
        episodes: config.eval_episodes,
        mean_reward,
        per_episode_rewards,
        baseline_mean_reward: baseline.mean_reward,
        reduction_pct: reduction_pct(mean_reward, baseline.mean_reward),
    })
}

/// Random-policy reference numbers, written to `baseline.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub seed: u64,
    pub episodes: usize,
    pub mean_reward: f64,
    pub per_episode: Vec<f64>,
}

pub fn run_baseline(
    hrap: &HrapConfig,
    episodes: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<BaselineRecord, HarnessError> {
    let report = random_baseline(hrap, episodes, seed)?;
    let record = BaselineRecord {
        seed,
        episodes,
        mean_reward: report.mean_reward,
        per_episode: report.per_episode,
    };
    fs::create_dir_all(out_dir)?;
    write_json(&out_dir.join("baseline.json"), &record)?;
    Ok(record)
}

/// Exhaustive optimum for one seeded instance, written to `oracle.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleRecord {
    pub seed: u64,
    pub assignment: Vec<usize>,
    pub best_makespan: u64,
    /// The reward an optimal policy earns on this instance.
    pub optimal_reward: f64,
}

pub fn run_oracle(
    hrap: &HrapConfig,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<OracleRecord, HarnessError> {
    let instance = generate_with_seed(hrap, seed)?;
    let (assignment, best_makespan) = brute_force_best(&instance)?;
    let record = OracleRecord {
        seed,
        assignment,
        best_makespan,
        optimal_reward: -(best_makespan as f64) / instance.psi() as f64,
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("oracle.json"), &record)?;
    }
    Ok(record)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
