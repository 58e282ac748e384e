use ndarray::{Array2, ArrayView2};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ddqn::DdqnNet;
use crate::error::NetError;
use crate::optim::Adam;
use crate::qnetwork::QNetwork;
use crate::Mode;

const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// Mean weighted squared TD error on expected Q values.
    SquaredTd,
    /// Cross-entropy against a projected target distribution.
    CategoricalCe,
}

/// Supervision for one training batch. `returns` holds the bootstrapped n-step
/// targets and always feeds the TD errors; `target_dist` is only consulted by
/// the categorical loss.
pub struct BatchTargets<'a> {
    pub actions: &'a [usize],
    pub returns: &'a [f64],
    pub target_dist: Option<ArrayView2<'a, f64>>,
    pub weights: Option<&'a [f64]>,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub loss: f64,
    /// Per-sample TD errors (return minus chosen-action Q), for priorities.
    pub td_errors: Vec<f64>,
    /// Global gradient norm before clipping.
    pub grad_norm: f64,
}

/// Either network kind behind one training and inference interface.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Network {
    Dist(QNetwork),
    Scalar(DdqnNet),
}

impl Network {
    pub fn num_actions(&self) -> usize {
        match self {
            Network::Dist(n) => n.config().num_actions,
            Network::Scalar(n) => n.num_actions(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Network::Dist(n) => n.config().input_dim,
            Network::Scalar(n) => n.input_dim(),
        }
    }

    /// Distribution support, when the network is distributional.
    pub fn support(&self) -> Option<&[f64]> {
        match self {
            Network::Dist(n) => Some(n.support()),
            Network::Scalar(_) => None,
        }
    }

    /// Rebuilds skipped buffers after deserialization.
    pub fn restore(&mut self) {
        if let Network::Dist(n) = self {
            n.restore();
        }
    }

    pub fn resample_noise(&mut self, rng: &mut ChaCha8Rng) {
        if let Network::Dist(n) = self {
            n.resample_noise(rng);
        }
    }

    pub fn q_values(&self, obs: &[f64], mode: Mode) -> Result<Vec<f64>, NetError> {
        match self {
            Network::Dist(n) => n.q_values(obs, mode),
            Network::Scalar(n) => n.q_values(obs),
        }
    }

    pub fn q_batch(&self, x: ArrayView2<f64>, mode: Mode) -> Result<Array2<f64>, NetError> {
        match self {
            Network::Dist(n) => n.q_batch(x, mode),
            Network::Scalar(n) => n.q_batch(x),
        }
    }

    /// Probability rows at the given actions; scalar networks have none.
    pub fn dist_rows(
        &self,
        x: ArrayView2<f64>,
        actions: &[usize],
        mode: Mode,
    ) -> Result<Array2<f64>, NetError> {
        match self {
            Network::Dist(n) => n.dist_rows(x, actions, mode),
            Network::Scalar(_) => Err(NetError::NotDistributional),
        }
    }

    fn validate_batch(&self, x: &ArrayView2<f64>, t: &BatchTargets) -> Result<(), NetError> {
        let b = x.nrows();
        if t.actions.len() != b || t.returns.len() != b {
            return Err(NetError::BatchShape(format!(
                "{} rows, {} actions, {} returns",
                b,
                t.actions.len(),
                t.returns.len()
            )));
        }
        if let Some(w) = t.weights {
            if w.len() != b {
                return Err(NetError::BatchShape(format!(
                    "{} rows, {} weights",
                    b,
                    w.len()
                )));
            }
        }
        if let Some(a) = t.actions.iter().find(|&&a| a >= self.num_actions()) {
            return Err(NetError::BatchShape(format!(
                "action {} out of range for {} actions",
                a,
                self.num_actions()
            )));
        }
        Ok(())
    }

    /// Forward-only loss under the current noise draw, for finite-difference checks.
    pub fn loss_only(
        &self,
        x: ArrayView2<f64>,
        targets: &BatchTargets,
        kind: LossKind,
    ) -> Result<f64, NetError> {
        self.validate_batch(&x, targets)?;
        let b = x.nrows();
        let weight = |i: usize| targets.weights.map_or(1.0, |w| w[i]);
        match (self, kind) {
            (Network::Scalar(_), LossKind::CategoricalCe) => Err(NetError::NotDistributional),
            (Network::Scalar(n), LossKind::SquaredTd) => {
                let q = n.q_batch(x)?;
                let mut loss = 0.0;
                for i in 0..b {
                    let delta = targets.returns[i] - q[(i, targets.actions[i])];
                    loss += weight(i) * delta * delta;
                }
                Ok(loss / b as f64)
            }
            (Network::Dist(n), LossKind::SquaredTd) => {
                let q = n.q_batch(x, Mode::Train)?;
                let mut loss = 0.0;
                for i in 0..b {
                    let delta = targets.returns[i] - q[(i, targets.actions[i])];
                    loss += weight(i) * delta * delta;
                }
                Ok(loss / b as f64)
            }
            (Network::Dist(n), LossKind::CategoricalCe) => {
                let m = targets
                    .target_dist
                    .ok_or(NetError::MissingTargetDistribution)?;
                let rows = n.dist_rows(x, targets.actions, Mode::Train)?;
                let mut loss = 0.0;
                for i in 0..b {
                    let mut ce = 0.0;
                    for j in 0..rows.ncols() {
                        ce -= m[(i, j)] * rows[(i, j)].max(LOG_FLOOR).ln();
                    }
                    loss += weight(i) * ce;
                }
                Ok(loss / b as f64)
            }
        }
    }

    /// Zeroes gradients, runs forward in train mode, and backpropagates the
    /// loss, leaving unclipped gradients in the parameter buffers. Returns the
    /// loss and per-sample TD errors.
    pub fn loss_and_grads(
        &mut self,
        x: ArrayView2<f64>,
        targets: &BatchTargets,
        kind: LossKind,
    ) -> Result<(f64, Vec<f64>), NetError> {
        self.validate_batch(&x, targets)?;
        self.zero_grads();
        let (loss, td_errors) = self.accumulate_grads(x, targets, kind)?;
        if !loss.is_finite() {
            return Err(NetError::NonFiniteLoss(loss));
        }
        Ok((loss, td_errors))
    }

    /// One gradient step: forward in train mode, backward, global-norm clip,
    /// Adam update. Returns the loss, per-sample TD errors, and pre-clip norm.
    pub fn train_on_batch(
        &mut self,
        x: ArrayView2<f64>,
        targets: &BatchTargets,
        kind: LossKind,
        opt: &mut Adam,
        clip_norm: f64,
    ) -> Result<TrainOutput, NetError> {
        let (loss, td_errors) = self.loss_and_grads(x, targets, kind)?;
        let grad_norm = self.grad_norm_sqr().sqrt();
        if clip_norm > 0.0 && grad_norm > clip_norm {
            self.scale_grads(clip_norm / grad_norm);
        }
        let t = opt.next_step();
        match self {
            Network::Dist(n) => n.adam_step_all(t, &opt.hyper),
            Network::Scalar(n) => n.adam_step_all(t, &opt.hyper),
        }
        Ok(TrainOutput {
            loss,
            td_errors,
            grad_norm,
        })
    }

    fn accumulate_grads(
        &mut self,
        x: ArrayView2<f64>,
        targets: &BatchTargets,
        kind: LossKind,
    ) -> Result<(f64, Vec<f64>), NetError> {
        let b = x.nrows();
        let inv_b = 1.0 / b as f64;
        let weight = |i: usize| targets.weights.map_or(1.0, |w| w[i]);
        match self {
            Network::Scalar(n) => {
                if kind == LossKind::CategoricalCe {
                    return Err(NetError::NotDistributional);
                }
                let trace = n.forward_trace(x)?;
                let mut loss = 0.0;
                let mut td = Vec::with_capacity(b);
                let mut dq = Vec::with_capacity(b);
                for i in 0..b {
                    let delta = targets.returns[i] - trace.q[(i, targets.actions[i])];
                    loss += weight(i) * delta * delta * inv_b;
                    td.push(delta);
                    dq.push(-2.0 * weight(i) * delta * inv_b);
                }
                n.backward(&trace, targets.actions, &dq);
                Ok((loss, td))
            }
            Network::Dist(n) => {
                let trace = n.forward_trace(x, Mode::Train)?;
                let q_taken = QNetwork::chosen_q(&trace, targets.actions);
                let td: Vec<f64> = targets
                    .returns
                    .iter()
                    .zip(&q_taken)
                    .map(|(g, q)| g - q)
                    .collect();
                let n_atoms = n.config().n_atoms;
                let mut upstream = Array2::zeros((b, n_atoms));
                let (loss, is_dlogits) = match kind {
                    LossKind::SquaredTd => {
                        let mut loss = 0.0;
                        let support: Vec<f64> = n.support().to_vec();
                        for i in 0..b {
                            loss += weight(i) * td[i] * td[i] * inv_b;
                            let dq = -2.0 * weight(i) * td[i] * inv_b;
                            for j in 0..n_atoms {
                                upstream[(i, j)] = dq * support[j];
                            }
                        }
                        (loss, false)
                    }
                    LossKind::CategoricalCe => {
                        let m = targets
                            .target_dist
                            .ok_or(NetError::MissingTargetDistribution)?;
                        if m.nrows() != b || m.ncols() != n_atoms {
                            return Err(NetError::BatchShape(format!(
                                "target distribution is {}x{}, expected {}x{}",
                                m.nrows(),
                                m.ncols(),
                                b,
                                n_atoms
                            )));
                        }
                        let logit_space =
                            n.config().dueling == crate::config::DuelingMode::LogitSpace;
                        let mut loss = 0.0;
                        for i in 0..b {
                            let p = QNetwork::probs_row(&trace, i, targets.actions[i]);
                            let mut ce = 0.0;
                            for j in 0..n_atoms {
                                ce -= m[(i, j)] * p[j].max(LOG_FLOOR).ln();
                                upstream[(i, j)] = if logit_space {
                                    weight(i) * (p[j] - m[(i, j)]) * inv_b
                                } else {
                                    -weight(i) * m[(i, j)] / p[j].max(LOG_FLOOR) * inv_b
                                };
                            }
                            loss += weight(i) * ce * inv_b;
                        }
                        (loss, logit_space)
                    }
                };
                n.backward(&trace, targets.actions, &upstream, is_dlogits)?;
                Ok((loss, td))
            }
        }
    }

    fn zero_grads(&mut self) {
        match self {
            Network::Dist(n) => n.zero_grads(),
            Network::Scalar(n) => n.zero_grads(),
        }
    }

    fn grad_norm_sqr(&self) -> f64 {
        match self {
            Network::Dist(n) => n.grad_norm_sqr(),
            Network::Scalar(n) => n.grad_norm_sqr(),
        }
    }

    fn scale_grads(&mut self, k: f64) {
        match self {
            Network::Dist(n) => n.scale_grads(k),
            Network::Scalar(n) => n.scale_grads(k),
        }
    }

    /// Visits every trainable scalar in a stable order shared with `grads_flat`.
    pub fn for_each_param_mut(&mut self, f: impl FnMut(&mut f64)) {
        match self {
            Network::Dist(n) => n.for_each_param_mut(f),
            Network::Scalar(n) => n.for_each_param_mut(f),
        }
    }

    pub fn grads_flat(&mut self) -> Vec<f64> {
        match self {
            Network::Dist(n) => n.grads_flat(),
            Network::Scalar(n) => n.grads_flat(),
        }
    }

    pub fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.for_each_param_mut(|_| n += 1);
        n
    }
}
