//! Behavioral checks on the network interface: probability rows, noise
//! handling, serialization, training mechanics.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcircuit::Topology;
use qnet::{
    Adam, AdamHyper, BatchTargets, DdqnNet, DuelingMode, LossKind, Mode, NetError, Network,
    NetworkConfig, QNetwork,
};

fn small_config(dueling: DuelingMode) -> NetworkConfig {
    let mut cfg = NetworkConfig::with_dims(10, 3);
    cfg.hidden = [16, 16];
    cfg.n_qubits = 3;
    cfg.n_layers = 2;
    cfg.topology = Topology::Ring;
    cfg.n_atoms = 11;
    cfg.dueling = dueling;
    cfg
}

fn random_obs(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn probability_rows_sum_to_one_in_both_dueling_modes() {
    for dueling in [DuelingMode::LogitSpace, DuelingMode::PostSoftmax] {
        let mut net = QNetwork::new(small_config(dueling), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        net.resample_noise(&mut rng);
        for i in 0..300 {
            let obs = random_obs(&mut rng, 10);
            let mode = if i % 2 == 0 { Mode::Train } else { Mode::Eval };
            let dist = net.dist_forward(&obs, mode).unwrap();
            for row in dist.probs.rows() {
                let sum: f64 = row.sum();
                assert!((sum - 1.0).abs() < 1e-6, "row sum {sum}");
                assert!(row.iter().all(|&p| p >= 0.0));
            }
        }
    }
}

#[test]
fn eval_mode_ignores_noise_resampling() {
    let mut net = Network::Dist(QNetwork::new(small_config(DuelingMode::LogitSpace), 5).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let obs = random_obs(&mut rng, 10);
    let before = net.q_values(&obs, Mode::Eval).unwrap();
    net.resample_noise(&mut rng);
    let train = net.q_values(&obs, Mode::Train).unwrap();
    let after = net.q_values(&obs, Mode::Eval).unwrap();
    assert_eq!(before, after);
    assert_ne!(before, train);
}

#[test]
fn serde_round_trip_preserves_eval_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut net = Network::Dist(QNetwork::new(small_config(DuelingMode::LogitSpace), 8).unwrap());
    net.resample_noise(&mut rng);
    let obs = random_obs(&mut rng, 10);
    let expected = net.q_values(&obs, Mode::Eval).unwrap();

    let json = serde_json::to_string(&net).unwrap();
    let mut loaded: Network = serde_json::from_str(&json).unwrap();
    loaded.restore();
    assert_eq!(loaded.q_values(&obs, Mode::Eval).unwrap(), expected);

    // Noise buffers are not persisted; training mode must still work after a
    // fresh resample.
    loaded.resample_noise(&mut rng);
    let train = loaded.q_values(&obs, Mode::Train).unwrap();
    assert!(train.iter().all(|v| v.is_finite()));
}

#[test]
fn cloned_target_matches_source_until_source_trains() {
    let mut main = Network::Dist(QNetwork::new(small_config(DuelingMode::LogitSpace), 12).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    main.resample_noise(&mut rng);
    let target = main.clone();

    let obs = random_obs(&mut rng, 10);
    assert_eq!(
        main.q_values(&obs, Mode::Eval).unwrap(),
        target.q_values(&obs, Mode::Eval).unwrap()
    );

    let x = Array2::from_shape_fn((4, 10), |(i, j)| ((i + 2 * j) as f64 * 0.37).sin());
    let targets = BatchTargets {
        actions: &[0, 1, 2, 0],
        returns: &[-0.5, -0.2, -0.8, -0.4],
        target_dist: None,
        weights: None,
    };
    let mut opt = Adam::new(AdamHyper {
        lr: 1e-2,
        ..AdamHyper::default()
    });
    main.train_on_batch(x.view(), &targets, LossKind::SquaredTd, &mut opt, 10.0)
        .unwrap();
    assert_ne!(
        main.q_values(&obs, Mode::Eval).unwrap(),
        target.q_values(&obs, Mode::Eval).unwrap()
    );
}

#[test]
fn repeated_steps_on_a_fixed_batch_reduce_the_loss() {
    for kind in [LossKind::SquaredTd, LossKind::CategoricalCe] {
        let mut net =
            Network::Dist(QNetwork::new(small_config(DuelingMode::LogitSpace), 77).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        net.resample_noise(&mut rng);

        let x = Array2::from_shape_fn((6, 10), |(i, j)| ((3 * i + j) as f64 * 0.21).cos());
        let actions = vec![0, 1, 2, 1, 0, 2];
        let returns = vec![-0.3, -0.6, -0.1, -0.9, -0.5, -0.2];
        let mut dist = Array2::zeros((6, 11));
        for (i, &g) in returns.iter().enumerate() {
            // Nearest support atom of the scalar return.
            let j = ((g + 1.0) / 0.1_f64).round() as usize;
            dist[(i, j)] = 1.0;
        }
        let targets = BatchTargets {
            actions: &actions,
            returns: &returns,
            target_dist: Some(dist.view()),
            weights: None,
        };
        let mut opt = Adam::new(AdamHyper {
            lr: 5e-3,
            ..AdamHyper::default()
        });
        let mut first = None;
        let mut last = 0.0;
        for _ in 0..60 {
            let out = net
                .train_on_batch(x.view(), &targets, kind, &mut opt, 10.0)
                .unwrap();
            first.get_or_insert(out.loss);
            last = out.loss;
        }
        let first = first.unwrap();
        assert!(
            last < 0.5 * first,
            "{kind:?}: loss went {first:.4} -> {last:.4}"
        );
    }
}

#[test]
fn gradient_clipping_rescales_to_the_requested_norm() {
    let mut net = Network::Scalar(DdqnNet::new(10, 3, [16, 16], 50).unwrap());
    let x = Array2::from_shape_fn((4, 10), |(i, j)| ((i * j) as f64 * 0.11).sin());
    let targets = BatchTargets {
        actions: &[0, 1, 2, 0],
        // Far outside the reachable Q range, forcing a large gradient.
        returns: &[50.0, -75.0, 60.0, -80.0],
        target_dist: None,
        weights: None,
    };
    let clip = 1e-3;
    let mut opt = Adam::new(AdamHyper::default());
    let out = net
        .train_on_batch(x.view(), &targets, LossKind::SquaredTd, &mut opt, clip)
        .unwrap();
    assert!(out.grad_norm > clip);
    let clipped: f64 = net.grads_flat().iter().map(|g| g * g).sum::<f64>().sqrt();
    assert!((clipped - clip).abs() < 1e-9, "clipped norm {clipped}");
}

#[test]
fn td_errors_are_return_minus_chosen_q() {
    let mut net = Network::Scalar(DdqnNet::new(10, 3, [16, 16], 51).unwrap());
    let x = Array2::from_shape_fn((3, 10), |(i, j)| ((i + j) as f64 * 0.31).sin());
    let actions = [2usize, 0, 1];
    let returns = [-0.25, -0.5, -0.75];
    let q = net.q_batch(x.view(), Mode::Train).unwrap();
    let targets = BatchTargets {
        actions: &actions,
        returns: &returns,
        target_dist: None,
        weights: None,
    };
    let (_, td) = net
        .loss_and_grads(x.view(), &targets, LossKind::SquaredTd)
        .unwrap();
    for i in 0..3 {
        let expected = returns[i] - q[(i, actions[i])];
        assert!((td[i] - expected).abs() < 1e-12);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut net = Network::Scalar(DdqnNet::new(10, 3, [16, 16], 52).unwrap());
    let x = Array2::zeros((2, 10));
    let mut opt = Adam::new(AdamHyper::default());

    let bad_action = BatchTargets {
        actions: &[0, 9],
        returns: &[-0.1, -0.2],
        target_dist: None,
        weights: None,
    };
    assert!(matches!(
        net.train_on_batch(x.view(), &bad_action, LossKind::SquaredTd, &mut opt, 10.0),
        Err(NetError::BatchShape(_))
    ));

    let nan_return = BatchTargets {
        actions: &[0, 1],
        returns: &[f64::NAN, -0.2],
        target_dist: None,
        weights: None,
    };
    assert!(matches!(
        net.train_on_batch(x.view(), &nan_return, LossKind::SquaredTd, &mut opt, 10.0),
        Err(NetError::NonFiniteLoss(_))
    ));

    assert!(matches!(
        net.dist_rows(x.view(), &[0, 1], Mode::Eval),
        Err(NetError::NotDistributional)
    ));
    assert!(matches!(
        net.train_on_batch(x.view(), &bad_action, LossKind::CategoricalCe, &mut opt, 10.0),
        Err(NetError::BatchShape(_))
    ));
}

#[test]
fn categorical_loss_without_target_distribution_errors() {
    let mut net = Network::Dist(QNetwork::new(small_config(DuelingMode::LogitSpace), 60).unwrap());
    let x = Array2::zeros((2, 10));
    let targets = BatchTargets {
        actions: &[0, 1],
        returns: &[-0.1, -0.2],
        target_dist: None,
        weights: None,
    };
    let mut opt = Adam::new(AdamHyper::default());
    assert!(matches!(
        net.train_on_batch(x.view(), &targets, LossKind::CategoricalCe, &mut opt, 10.0),
        Err(NetError::MissingTargetDistribution)
    ));
}
