use serde::{Deserialize, Serialize};

/// Adam hyperparameters shared by every tensor of a network.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Optimizer state: hyperparameters plus the global step used for bias correction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    pub hyper: AdamHyper,
    steps: u64,
}

impl Adam {
    pub fn new(hyper: AdamHyper) -> Self {
        Self { hyper, steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Advances the step counter and returns it for this update's bias correction.
    pub fn next_step(&mut self) -> u64 {
        self.steps += 1;
        self.steps
    }
}
