use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::sumtree::SumTree;

/// One aggregated n-step experience: the window's discounted reward sum plus
/// where (and whether) to bootstrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NStepTransition {
    pub state: Vec<f64>,
    pub action: usize,
    /// Discounted reward sum over the window's `steps` rewards.
    pub reward_sum: f64,
    /// State after the last step of the window; bootstrap target when the
    /// window contains no terminal.
    pub boot_state: Vec<f64>,
    pub terminal: bool,
    pub steps: u32,
}

/// Ring buffer with proportional prioritized sampling.
///
/// Stored priorities are `|delta|^alpha + eps`, already exponentiated, and
/// sampling draws independently with replacement proportional to them. New
/// items enter at the running maximum priority (1.0 while empty) so they are
/// seen at least once before their first TD error is known.
#[derive(Debug, Clone)]
pub struct PrioritizedReplay {
    capacity: usize,
    alpha: f64,
    eps: f64,
    items: Vec<NStepTransition>,
    tree: SumTree,
    next: usize,
    max_priority: f64,
}

impl PrioritizedReplay {
    pub fn new(capacity: usize, alpha: f64, eps: f64) -> Self {
        assert!(capacity > 0 && alpha >= 0.0 && eps > 0.0);
        Self {
            capacity,
            alpha,
            eps,
            items: Vec::new(),
            tree: SumTree::new(capacity),
            next: 0,
            max_priority: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Inserts at the running max priority, evicting the oldest entry once full.
    pub fn push(&mut self, item: NStepTransition) {
        let idx = self.next;
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else {
            self.items[idx] = item;
        }
        self.tree.set(idx, self.max_priority);
        self.next = (self.next + 1) % self.capacity;
    }

    pub fn get(&self, idx: usize) -> &NStepTransition {
        &self.items[idx]
    }

    pub fn priority(&self, idx: usize) -> f64 {
        self.tree.get(idx)
    }

    pub fn total_priority(&self) -> f64 {
        self.tree.total()
    }

    /// Stored priority from a fresh TD error: `|delta|^alpha + eps`.
    pub fn update_priority(&mut self, idx: usize, td_error: f64) {
        let p = td_error.abs().powf(self.alpha) + self.eps;
        self.tree.set(idx, p);
        if p > self.max_priority {
            self.max_priority = p;
        }
    }

    /// `batch` independent proportional draws (with replacement). Returns
    /// `None` until at least `batch` items are stored.
    pub fn sample(&self, batch: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        if self.items.len() < batch {
            return None;
        }
        let total = self.tree.total();
        let mut indices = Vec::with_capacity(batch);
        for _ in 0..batch {
            let u: f64 = rng.gen_range(0.0..total);
            indices.push(self.tree.find(u).min(self.items.len() - 1));
        }
        Some(indices)
    }

    /// Importance weights `(N * P(i))^(-beta)`, normalized by the batch maximum.
    pub fn is_weights(&self, indices: &[usize], beta: f64) -> Vec<f64> {
        let total = self.tree.total();
        let n = self.items.len() as f64;
        let mut w: Vec<f64> = indices
            .iter()
            .map(|&i| (n * self.tree.get(i) / total).powf(-beta))
            .collect();
        let max = w.iter().cloned().fold(0.0f64, f64::max);
        if max > 0.0 {
            for v in &mut w {
                *v /= max;
            }
        }
        w
    }
}
