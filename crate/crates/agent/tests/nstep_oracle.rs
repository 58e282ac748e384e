//! n-step return targets checked against hand arithmetic and a rigged pair of
//! networks whose Q-values are known constants.

use proptest::prelude::*;

use agent::{aggregate_window, bootstrap_target, n_step_return, Transition};
use qnet::{DdqnNet, Network};

/// Network whose forward pass ignores the input: every trunk weight is zero,
/// so the Q-values equal the output head's bias vector.
fn constant_q_net(input_dim: usize, q: &[f64]) -> Network {
    let mut net = Network::Scalar(DdqnNet::new(input_dim, q.len(), [8, 8], 0).unwrap());
    let total = net.param_count();
    let start = total - q.len();
    let mut idx = 0;
    net.for_each_param_mut(|v| {
        *v = if idx >= start { q[idx - start] } else { 0.0 };
        idx += 1;
    });
    net
}

fn step(reward: f64, done: bool) -> Transition {
    Transition {
        state: vec![0.0; 4],
        action: 0,
        reward,
        next_state: vec![0.0; 4],
        done,
    }
}

#[test]
fn constant_net_returns_its_bias_vector() {
    let net = constant_q_net(4, &[-0.2, -0.7]);
    let q = net.q_values(&[9.0, -3.0, 0.5, 2.2], qnet::Mode::Eval).unwrap();
    assert!((q[0] + 0.2).abs() < 1e-15 && (q[1] + 0.7).abs() < 1e-15);
}

#[test]
fn three_step_return_matches_hand_arithmetic() {
    // a* = argmax main = action 0; bootstrap value = target[0] = -0.2.
    let main = constant_q_net(4, &[0.3, 0.1]);
    let target = constant_q_net(4, &[-0.2, -0.7]);
    let window = [step(-0.5, false), step(-0.4, false), step(-0.3, false)];
    let g = n_step_return(&window, &main, &target, 0.9).unwrap();
    assert!(
        (g - (-1.2488)).abs() < 1e-12,
        "expected -1.2488, got {g:.12}"
    );
}

#[test]
fn bootstrap_action_comes_from_main_and_value_from_target() {
    // Main prefers action 1, target prefers action 0; the correct pairing
    // bootstraps with target's value of action 1.
    let main = constant_q_net(4, &[0.0, 1.0]);
    let target = constant_q_net(4, &[5.0, 2.0]);
    let window = [step(0.0, false)];
    let g = n_step_return(&window, &main, &target, 0.9).unwrap();
    assert!((g - 0.9 * 2.0).abs() < 1e-12, "got {g}");
    // 4.5 would mean target picked the action; 0.9 would mean main supplied
    // the value.
    assert!((g - 4.5).abs() > 0.1 && (g - 0.9).abs() > 0.1);
}

#[test]
fn one_step_window_reduces_to_the_double_dqn_target() {
    let main = constant_q_net(4, &[0.2, 0.8]);
    let target = constant_q_net(4, &[-0.4, -0.6]);
    let g = n_step_return(&[step(-0.15, false)], &main, &target, 0.99).unwrap();
    assert!((g - (-0.15 + 0.99 * -0.6)).abs() < 1e-12);
}

#[test]
fn terminal_window_suppresses_the_bootstrap() {
    let main = constant_q_net(4, &[100.0, 100.0]);
    let target = constant_q_net(4, &[100.0, 100.0]);
    let window = [step(-0.5, false), step(-0.4, true)];
    let g = n_step_return(&window, &main, &target, 0.9).unwrap();
    assert!((g - (-0.5 - 0.36)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The aggregated-item path used by the replay buffer and the direct
    /// window computation give the same return.
    #[test]
    fn aggregated_items_agree_with_direct_window_returns(
        rewards in prop::collection::vec(-1.0f64..0.0, 1..=5),
        terminal_at in prop::option::of(0usize..5),
        gamma in 0.5f64..1.0,
        q0 in -1.0f64..0.0,
        q1 in -1.0f64..0.0,
    ) {
        let window: Vec<Transition> = rewards
            .iter()
            .enumerate()
            .map(|(k, &r)| step(r, terminal_at == Some(k)))
            .collect();
        let main = constant_q_net(4, &[q0, q1]);
        let target = constant_q_net(4, &[q1, q0]);

        let direct = n_step_return(&window, &main, &target, gamma).unwrap();
        let item = aggregate_window(&window, gamma);
        let via_item = bootstrap_target(&item, &main, &target, gamma).unwrap();
        prop_assert!((direct - via_item).abs() < 1e-12);

        // Against the closed formula with constant target Q.
        let m = terminal_at.filter(|&t| t < rewards.len()).map_or(rewards.len(), |t| t + 1);
        let reward_part: f64 = rewards[..m]
            .iter()
            .enumerate()
            .map(|(k, &r)| gamma.powi(k as i32) * r)
            .sum();
        let boot = if terminal_at.filter(|&t| t < rewards.len()).is_some() {
            0.0
        } else {
            // a* from main's biases, value from target's swapped biases.
            let a_star = if q0 >= q1 { 0 } else { 1 };
            gamma.powi(m as i32) * [q1, q0][a_star]
        };
        prop_assert!((direct - (reward_part + boot)).abs() < 1e-10);
    }
}
