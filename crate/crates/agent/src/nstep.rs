use std::collections::VecDeque;

use qnet::{Mode, Network};

use crate::error::AgentError;
use crate::replay::NStepTransition;

/// One environment step as seen by the agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Collapses a window of consecutive transitions into one n-step item: the
/// discounted reward sum up to the first terminal (or the full window) plus
/// the bootstrap state.
pub fn aggregate_window(window: &[Transition], gamma: f64) -> NStepTransition {
    assert!(!window.is_empty());
    let m = window
        .iter()
        .position(|t| t.done)
        .map_or(window.len(), |i| i + 1);
    let reward_sum = window[..m]
        .iter()
        .enumerate()
        .map(|(k, t)| gamma.powi(k as i32) * t.reward)
        .sum();
    NStepTransition {
        state: window[0].state.clone(),
        action: window[0].action,
        reward_sum,
        boot_state: window[m - 1].next_state.clone(),
        terminal: window[m - 1].done,
        steps: m as u32,
    }
}

/// Finishes an aggregated item into a scalar return: bootstrap action from the
/// main network, bootstrap value from the target network, suppressed entirely
/// when the window ended an episode.
pub fn bootstrap_target(
    item: &NStepTransition,
    main: &Network,
    target: &Network,
    gamma: f64,
) -> Result<f64, AgentError> {
    if item.terminal {
        return Ok(item.reward_sum);
    }
    let a_star = argmax_lowest(&main.q_values(&item.boot_state, Mode::Train)?);
    let q = target.q_values(&item.boot_state, Mode::Eval)?[a_star];
    Ok(item.reward_sum + gamma.powi(item.steps as i32) * q)
}

/// n-step double-DQN return of one window:
/// `G = sum_k gamma^k r_k + [no terminal] * gamma^n * Q_target(s_n, a*)`
/// with `a* = argmax_a Q_main(s_n, a)`.
pub fn n_step_return(
    window: &[Transition],
    main: &Network,
    target: &Network,
    gamma: f64,
) -> Result<f64, AgentError> {
    bootstrap_target(&aggregate_window(window, gamma), main, target, gamma)
}

/// Sliding-window collector that turns a transition stream into aggregated
/// n-step items. A terminal flushes every pending suffix window, so episode
/// tails shorter than `n` are still emitted (marked terminal).
#[derive(Debug, Clone)]
pub struct NStepBuilder {
    n: usize,
    gamma: f64,
    window: VecDeque<Transition>,
}

impl NStepBuilder {
    pub fn new(n: usize, gamma: f64) -> Self {
        assert!(n >= 1 && gamma > 0.0 && gamma <= 1.0);
        Self {
            n,
            gamma,
            window: VecDeque::new(),
        }
    }

    pub fn pending(&self) -> usize {
        self.window.len()
    }

    /// Feeds one step; returns every n-step item completed by it.
    pub fn push(&mut self, t: Transition) -> Vec<NStepTransition> {
        let done = t.done;
        self.window.push_back(t);
        let mut out = Vec::new();
        if done {
            while !self.window.is_empty() {
                out.push(aggregate_window(self.window.make_contiguous(), self.gamma));
                self.window.pop_front();
            }
        } else if self.window.len() == self.n {
            out.push(aggregate_window(self.window.make_contiguous(), self.gamma));
            self.window.pop_front();
        }
        out
    }
}
