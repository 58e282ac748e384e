/// Binary indexed sum tree over a fixed number of leaves.
///
/// Point updates and prefix-sum descent are both O(log capacity), which keeps
/// proportional sampling cheap at replay-buffer scale.
#[derive(Debug, Clone)]
pub(crate) struct SumTree {
    capacity: usize,
    /// Heap layout: node i has children 2i+1 and 2i+2, leaves start at capacity-1.
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            nodes: vec![0.0; 2 * capacity - 1],
        }
    }

    pub fn total(&self) -> f64 {
        self.nodes[0]
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.nodes[self.capacity - 1 + idx]
    }

    pub fn set(&mut self, idx: usize, value: f64) {
        debug_assert!(idx < self.capacity && value >= 0.0);
        let mut node = self.capacity - 1 + idx;
        let delta = value - self.nodes[node];
        self.nodes[node] = value;
        while node > 0 {
            node = (node - 1) / 2;
            self.nodes[node] += delta;
        }
    }

    /// Index of the leaf whose cumulative-sum interval contains `prefix`.
    pub fn find(&self, prefix: f64) -> usize {
        let mut node = 0;
        let mut rest = prefix.clamp(0.0, self.total());
        while node < self.capacity - 1 {
            let left = 2 * node + 1;
            if rest <= self.nodes[left] {
                node = left;
            } else {
                rest -= self.nodes[left];
                node = left + 1;
            }
        }
        node - (self.capacity - 1)
    }
}
