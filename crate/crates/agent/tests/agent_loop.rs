//! End-to-end behavior of the training loop on the real environment.

use ndarray::Array2;
use qcircuit::Topology;
use tempfile::tempdir;

use agent::{Agent, AgentConfig, AgentSeeds, Checkpoint, Transition};
use hrap_env::{HrapConfig, HrapEnv, ObsMode};
use qnet::{
    Adam, AdamHyper, BatchTargets, DdqnNet, LossKind, Mode, Network, NetworkConfig, QNetwork,
};

fn small_env() -> HrapEnv {
    let config = HrapConfig {
        num_officers: 2,
        num_events: 2,
        num_tasks: 2,
        seed: 0,
        ..HrapConfig::default()
    };
    HrapEnv::new(config, ObsMode::Literal).unwrap()
}

fn small_agent(loss: LossKind) -> (HrapEnv, Agent) {
    let env = small_env();
    let mut net_cfg = NetworkConfig::with_dims(env.obs_dim(), env.num_actions());
    net_cfg.hidden = [16, 16];
    net_cfg.n_qubits = 2;
    net_cfg.n_layers = 1;
    net_cfg.topology = Topology::Ring;
    net_cfg.n_atoms = 11;
    let net = Network::Dist(QNetwork::new(net_cfg, 3).unwrap());
    let agent_cfg = AgentConfig {
        batch_size: 16,
        warmup: 32,
        capacity: 512,
        target_sync_every: 40,
        learning_rate: 1e-3,
        loss,
        ..AgentConfig::default()
    };
    let agent = Agent::new(
        net,
        agent_cfg,
        AgentSeeds {
            noise: 11,
            action: 12,
            replay: 13,
        },
    )
    .unwrap();
    (env, agent)
}

fn train_episodes(env: &HrapEnv, agent: &mut Agent, episodes: u64) -> Vec<f64> {
    let mut losses = Vec::new();
    for ep in 0..episodes {
        let (mut state, mut obs) = env.reset(1000 + ep);
        while !state.is_done() {
            let action = agent.select_action(&obs).unwrap();
            let out = env.step(&mut state, action).unwrap();
            let t = Transition {
                state: obs.clone(),
                action,
                reward: out.reward,
                next_state: out.observation.clone(),
                done: out.done,
            };
            obs = out.observation;
            if let Some(stats) = agent.observe(t).unwrap() {
                losses.push(stats.loss);
            }
        }
        agent.end_episode();
    }
    losses
}

#[test]
fn training_loop_runs_and_keeps_its_counters_consistent() {
    for loss in [LossKind::SquaredTd, LossKind::CategoricalCe] {
        let (env, mut agent) = small_agent(loss);
        let losses = train_episodes(&env, &mut agent, 30);

        assert_eq!(agent.env_steps(), 30 * 4);
        assert_eq!(agent.episodes(), 30);
        assert!(agent.train_steps() > 0);
        assert_eq!(agent.train_steps(), losses.len() as u64);
        assert!(losses.iter().all(|l| l.is_finite()));
        assert!(agent.epsilon() < 1.0 && agent.epsilon() >= 0.05);
        // Every stored transition is kept until capacity.
        assert_eq!(agent.replay_len(), 30 * 4);

        let eval = agent.evaluate(&env, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(eval.per_episode.len(), 5);
        assert!(eval
            .per_episode
            .iter()
            .all(|r| (-1.0..=0.0).contains(r)));
        let again = agent.evaluate(&env, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(eval.per_episode, again.per_episode);
    }
}

#[test]
fn priorities_are_refreshed_for_trained_samples() {
    let (env, mut agent) = small_agent(LossKind::SquaredTd);
    train_episodes(&env, &mut agent, 20);
    let replay = agent.replay();
    let mut touched = 0;
    for i in 0..replay.len() {
        let p = replay.priority(i);
        assert!(p > 0.0);
        if (p - 1.0).abs() > 1e-12 {
            touched += 1;
        }
    }
    assert!(touched > 0, "no priorities were updated");
}

#[test]
fn target_network_is_bit_identical_after_sync() {
    let (env, mut agent) = small_agent(LossKind::SquaredTd);
    train_episodes(&env, &mut agent, 10);

    let obs = env.reset(77).1;
    assert_ne!(
        agent.main().q_values(&obs, Mode::Eval).unwrap(),
        agent.target().q_values(&obs, Mode::Eval).unwrap(),
        "main should have drifted from target between syncs"
    );
    agent.sync_target();
    assert_eq!(
        agent.main().q_values(&obs, Mode::Eval).unwrap(),
        agent.target().q_values(&obs, Mode::Eval).unwrap()
    );
}

#[test]
fn periodic_sync_fires_on_the_configured_interval() {
    let (env, mut agent) = small_agent(LossKind::SquaredTd);
    // 30 episodes * 4 steps = 120 env steps; warmup fills at 32 stored items,
    // so more than 40 train steps happen and at least one periodic sync fires.
    train_episodes(&env, &mut agent, 30);
    assert!(agent.train_steps() > 40);
    let synced_at = agent.train_steps() - agent.train_steps() % 40;
    assert!(synced_at > 0);
}

#[test]
fn zero_td_batch_leaves_parameters_unchanged_on_first_step() {
    let mut net = Network::Scalar(DdqnNet::new(4, 2, [8, 8], 9).unwrap());
    let x = Array2::from_shape_fn((3, 4), |(i, j)| ((i + j) as f64 * 0.3).sin());
    let q = net.q_batch(x.view(), Mode::Train).unwrap();
    let actions = [0usize, 1, 0];
    let returns: Vec<f64> = (0..3).map(|i| q[(i, actions[i])]).collect();

    let mut before = Vec::new();
    net.for_each_param_mut(|v| before.push(*v));
    let mut opt = Adam::new(AdamHyper::default());
    let out = net
        .train_on_batch(
            x.view(),
            &BatchTargets {
                actions: &actions,
                returns: &returns,
                target_dist: None,
                weights: None,
            },
            LossKind::SquaredTd,
            &mut opt,
            10.0,
        )
        .unwrap();
    assert_eq!(out.loss, 0.0);
    assert_eq!(out.grad_norm, 0.0);
    let mut after = Vec::new();
    net.for_each_param_mut(|v| after.push(*v));
    assert_eq!(before, after);
}

#[test]
fn checkpoint_round_trip_preserves_evaluation_and_counters() {
    let (env, mut agent) = small_agent(LossKind::SquaredTd);
    train_episodes(&env, &mut agent, 15);

    let dir = tempdir().unwrap();
    let path = dir.path().join("checkpoint.json");
    Checkpoint::of(&agent).save(&path).unwrap();
    let restored = Checkpoint::load(&path).unwrap().into_agent().unwrap();

    assert_eq!(restored.env_steps(), agent.env_steps());
    assert_eq!(restored.train_steps(), agent.train_steps());
    assert_eq!(restored.episodes(), agent.episodes());
    assert_eq!(restored.epsilon(), agent.epsilon());
    assert_eq!(restored.optimizer_steps(), agent.optimizer_steps());

    let seeds: Vec<u64> = (100..120).collect();
    let a = agent.evaluate(&env, &seeds).unwrap();
    let b = restored.evaluate(&env, &seeds).unwrap();
    assert_eq!(a.per_episode, b.per_episode);
}

#[test]
fn resumed_rng_streams_continue_where_they_left_off() {
    let (env, mut agent) = small_agent(LossKind::SquaredTd);
    train_episodes(&env, &mut agent, 10);

    let cp = Checkpoint::of(&agent);
    let mut restored = cp.into_agent().unwrap();

    // Same exploration decisions from both copies after restore.
    let obs = env.reset(5).1;
    for _ in 0..20 {
        assert_eq!(
            agent.select_action(&obs).unwrap(),
            restored.select_action(&obs).unwrap()
        );
    }
}
