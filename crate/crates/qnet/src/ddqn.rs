use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::layers::{relu, relu_backward, Linear};
use crate::optim::AdamHyper;

/// Plain MLP with one scalar Q output per action, used as the classical
/// double-DQN baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DdqnNet {
    input_dim: usize,
    num_actions: usize,
    hidden: [usize; 2],
    l1: Linear,
    l2: Linear,
    head: Linear,
}

pub(crate) struct DdqnTrace {
    x: Array2<f64>,
    a1: Array2<f64>,
    a2: Array2<f64>,
    pub q: Array2<f64>,
}

impl DdqnNet {
    pub fn new(
        input_dim: usize,
        num_actions: usize,
        hidden: [usize; 2],
        seed: u64,
    ) -> Result<Self, NetError> {
        if input_dim == 0 || num_actions == 0 || hidden.contains(&0) {
            return Err(NetError::InvalidConfig("dimensions must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            input_dim,
            num_actions,
            hidden,
            l1: Linear::init(input_dim, hidden[0], &mut rng),
            l2: Linear::init(hidden[0], hidden[1], &mut rng),
            head: Linear::init(hidden[1], num_actions, &mut rng),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub(crate) fn forward_trace(&self, x: ArrayView2<f64>) -> Result<DdqnTrace, NetError> {
        if x.ncols() != self.input_dim {
            return Err(NetError::InputDim {
                got: x.ncols(),
                expected: self.input_dim,
            });
        }
        let x = x.to_owned();
        let a1 = relu(&self.l1.forward(&x));
        let a2 = relu(&self.l2.forward(&a1));
        let q = self.head.forward(&a2);
        Ok(DdqnTrace { x, a1, a2, q })
    }

    pub fn q_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, NetError> {
        Ok(self.forward_trace(x)?.q)
    }

    pub fn q_values(&self, obs: &[f64]) -> Result<Vec<f64>, NetError> {
        let x = ArrayView2::from_shape((1, obs.len()), obs).map_err(|_| NetError::InputDim {
            got: obs.len(),
            expected: self.input_dim,
        })?;
        Ok(self.q_batch(x)?.row(0).to_vec())
    }

    /// Backpropagates from gradients on the chosen Q entries.
    pub(crate) fn backward(&mut self, trace: &DdqnTrace, actions: &[usize], dq_rows: &[f64]) {
        let mut dq = Array2::zeros(trace.q.raw_dim());
        for (b, (&a, &d)) in actions.iter().zip(dq_rows).enumerate() {
            dq[(b, a)] = d;
        }
        let da2 = self.head.backward(&trace.a2, &dq);
        let dz2 = relu_backward(&da2, &trace.a2);
        let da1 = self.l2.backward(&trace.a1, &dz2);
        let dz1 = relu_backward(&da1, &trace.a1);
        let _ = self.l1.backward(&trace.x, &dz1);
    }

    fn params_mut(&mut self) -> (Vec<&mut crate::param::P2>, Vec<&mut crate::param::P1>) {
        (
            vec![&mut self.l1.w, &mut self.l2.w, &mut self.head.w],
            vec![&mut self.l1.b, &mut self.l2.b, &mut self.head.b],
        )
    }

    pub(crate) fn zero_grads(&mut self) {
        let (p2, p1) = self.params_mut();
        for p in p2 {
            p.zero_grad();
        }
        for p in p1 {
            p.zero_grad();
        }
    }

    pub(crate) fn grad_norm_sqr(&self) -> f64 {
        self.l1.w.grad_norm_sqr()
            + self.l1.b.grad_norm_sqr()
            + self.l2.w.grad_norm_sqr()
            + self.l2.b.grad_norm_sqr()
            + self.head.w.grad_norm_sqr()
            + self.head.b.grad_norm_sqr()
    }

    pub(crate) fn scale_grads(&mut self, k: f64) {
        let (p2, p1) = self.params_mut();
        for p in p2 {
            p.scale_grad(k);
        }
        for p in p1 {
            p.scale_grad(k);
        }
    }

    pub(crate) fn adam_step_all(&mut self, t: u64, hp: &AdamHyper) {
        let (p2, p1) = self.params_mut();
        for p in p2 {
            p.adam_step(t, hp);
        }
        for p in p1 {
            p.adam_step(t, hp);
        }
    }

    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        let (p2, p1) = self.params_mut();
        for p in p2 {
            for v in p.v.iter_mut() {
                f(v);
            }
        }
        for p in p1 {
            for v in p.v.iter_mut() {
                f(v);
            }
        }
    }

    pub fn grads_flat(&mut self) -> Vec<f64> {
        let mut out = Vec::new();
        let (p2, p1) = self.params_mut();
        for p in p2 {
            out.extend(p.g.iter().copied());
        }
        for p in p1 {
            out.extend(p.g.iter().copied());
        }
        out
    }
}
