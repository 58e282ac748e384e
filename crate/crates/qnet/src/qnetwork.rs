use ndarray::{Array1, Array2, Array3, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qcircuit::{gradient, prepare, AngleVector, CircuitSpec};

use crate::config::{DuelingMode, FeatureKind, NetworkConfig};
use crate::error::NetError;
use crate::layers::{relu, relu_backward, Linear, NoisyLinear};
use crate::optim::AdamHyper;
use crate::Mode;

/// Per-action probability rows over the distribution support.
#[derive(Debug, Clone, PartialEq)]
pub struct DistOutput {
    /// `(num_actions, n_atoms)`, each row a probability vector.
    pub probs: Array2<f64>,
}

impl DistOutput {
    /// Expected value per action under the given support.
    pub fn q_values(&self, support: &[f64]) -> Vec<f64> {
        self.probs
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(support).map(|(p, z)| p * z).sum())
            .collect()
    }
}

/// Distributional dueling Q-network.
///
/// Two noisy relu layers feed a tanh angle encoder; the angles drive either the
/// variational circuit readout or its dense stand-in, and two linear heads turn
/// those features into value and advantage logits that are merged per
/// [`DuelingMode`] into one probability row per action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QNetwork {
    config: NetworkConfig,
    spec: CircuitSpec,
    l1: NoisyLinear,
    l2: NoisyLinear,
    encoder: Linear,
    feature: Option<Linear>,
    head_v: Linear,
    head_a: Linear,
    #[serde(skip, default)]
    support: Vec<f64>,
}

pub(crate) struct QTrace {
    mode: Mode,
    x: Array2<f64>,
    w1_eff: Array2<f64>,
    a1: Array2<f64>,
    w2_eff: Array2<f64>,
    a2: Array2<f64>,
    /// tanh of the encoder pre-activation; angles are `angle_scale` times this.
    enc_tanh: Array2<f64>,
    angles: Array2<f64>,
    feat: Array2<f64>,
    combine: CombineTrace,
    pub probs: Array3<f64>,
    pub q: Array2<f64>,
}

enum CombineTrace {
    LogitSpace,
    PostSoftmax {
        v_soft: Array2<f64>,
        a_soft: Array3<f64>,
        y: Array3<f64>,
        row_sum: Array2<f64>,
    },
}

fn softmax_inplace(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// d(loss)/d(logits) of one softmax row given d(loss)/d(probs).
fn softmax_backward_row(probs: &[f64], dprobs: &[f64], out: &mut [f64]) {
    let dot: f64 = probs.iter().zip(dprobs).map(|(p, d)| p * d).sum();
    for ((o, &p), &d) in out.iter_mut().zip(probs).zip(dprobs) {
        *o = p * (d - dot);
    }
}

impl QNetwork {
    pub fn new(config: NetworkConfig, seed: u64) -> Result<Self, NetError> {
        config.validate()?;
        let spec = config.circuit_spec()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles = config.angle_count();
        let l1 = NoisyLinear::init(config.input_dim, config.hidden[0], &mut rng);
        let l2 = NoisyLinear::init(config.hidden[0], config.hidden[1], &mut rng);
        let encoder = Linear::init(config.hidden[1], angles, &mut rng);
        let feature = match config.feature {
            FeatureKind::Quantum => None,
            FeatureKind::DenseTanh => Some(Linear::init(angles, config.n_qubits, &mut rng)),
        };
        let head_v = Linear::init(config.n_qubits, config.n_atoms, &mut rng);
        let head_a = Linear::init(config.n_qubits, config.num_actions * config.n_atoms, &mut rng);
        let support = config.support();
        Ok(Self {
            config,
            spec,
            l1,
            l2,
            encoder,
            feature,
            head_v,
            head_a,
            support,
        })
    }

    /// Rebuilds the skipped buffers after deserialization.
    pub fn restore(&mut self) {
        self.l1.ensure_noise_shape();
        self.l2.ensure_noise_shape();
        self.support = self.config.support();
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn resample_noise(&mut self, rng: &mut ChaCha8Rng) {
        self.l1.resample(rng);
        self.l2.resample(rng);
    }

    pub(crate) fn forward_trace(&self, x: ArrayView2<f64>, mode: Mode) -> Result<QTrace, NetError> {
        if x.ncols() != self.config.input_dim {
            return Err(NetError::InputDim {
                got: x.ncols(),
                expected: self.config.input_dim,
            });
        }
        let batch = x.nrows();
        let (n_actions, n_atoms) = (self.config.num_actions, self.config.n_atoms);
        let x = x.to_owned();

        let (w1, b1) = self.l1.effective(mode);
        let a1 = relu(&(x.dot(&w1.t()) + &b1));
        let (w2, b2) = self.l2.effective(mode);
        let a2 = relu(&(a1.dot(&w2.t()) + &b2));

        let enc_tanh = self.encoder.forward(&a2).mapv(f64::tanh);
        let angles = &enc_tanh * self.config.angle_scale;

        let feat = match (&self.config.feature, &self.feature) {
            (FeatureKind::Quantum, _) => {
                let mut feat = Array2::zeros((batch, self.config.n_qubits));
                for (b, row) in angles.rows().into_iter().enumerate() {
                    let av = AngleVector::new(&self.spec, row.to_vec())?;
                    let state = prepare(&self.spec, &av)?;
                    for (q, z) in state.expect_z_all().into_iter().enumerate() {
                        feat[(b, q)] = z;
                    }
                }
                feat
            }
            (FeatureKind::DenseTanh, Some(layer)) => layer.forward(&angles).mapv(f64::tanh),
            (FeatureKind::DenseTanh, None) => unreachable!("feature layer built in new()"),
        };

        let hv = self.head_v.forward(&feat);
        let ha = self.head_a.forward(&feat);

        let mut probs = Array3::zeros((batch, n_actions, n_atoms));
        let combine = match self.config.dueling {
            DuelingMode::LogitSpace => {
                for b in 0..batch {
                    for j in 0..n_atoms {
                        let mean: f64 =
                            (0..n_actions).map(|a| ha[(b, a * n_atoms + j)]).sum::<f64>()
                                / n_actions as f64;
                        for a in 0..n_actions {
                            probs[(b, a, j)] = hv[(b, j)] + ha[(b, a * n_atoms + j)] - mean;
                        }
                    }
                    for a in 0..n_actions {
                        softmax_inplace(probs.slice_mut(ndarray::s![b, a, ..]).into_slice().unwrap());
                    }
                }
                CombineTrace::LogitSpace
            }
            DuelingMode::PostSoftmax => {
                let mut v_soft = hv.clone();
                for mut row in v_soft.rows_mut() {
                    softmax_inplace(row.as_slice_mut().unwrap());
                }
                let mut a_soft = Array3::zeros((batch, n_actions, n_atoms));
                for b in 0..batch {
                    for a in 0..n_actions {
                        let mut row: Vec<f64> =
                            (0..n_atoms).map(|j| ha[(b, a * n_atoms + j)]).collect();
                        softmax_inplace(&mut row);
                        for (j, p) in row.into_iter().enumerate() {
                            a_soft[(b, a, j)] = p;
                        }
                    }
                }
                let mut y = Array3::zeros((batch, n_actions, n_atoms));
                let mut row_sum = Array2::zeros((batch, n_actions));
                for b in 0..batch {
                    for j in 0..n_atoms {
                        let mean: f64 = (0..n_actions).map(|a| a_soft[(b, a, j)]).sum::<f64>()
                            / n_actions as f64;
                        for a in 0..n_actions {
                            y[(b, a, j)] = v_soft[(b, j)] + a_soft[(b, a, j)] - mean;
                        }
                    }
                    // Combined rows sum to 1, so the clipped mass is always positive.
                    for a in 0..n_actions {
                        let mut sum = 0.0;
                        for j in 0..n_atoms {
                            sum += y[(b, a, j)].max(0.0);
                        }
                        row_sum[(b, a)] = sum;
                        for j in 0..n_atoms {
                            probs[(b, a, j)] = y[(b, a, j)].max(0.0) / sum;
                        }
                    }
                }
                CombineTrace::PostSoftmax {
                    v_soft,
                    a_soft,
                    y,
                    row_sum,
                }
            }
        };

        let mut q = Array2::zeros((batch, n_actions));
        for b in 0..batch {
            for a in 0..n_actions {
                q[(b, a)] = (0..n_atoms)
                    .map(|j| probs[(b, a, j)] * self.support[j])
                    .sum();
            }
        }

        Ok(QTrace {
            mode,
            x,
            w1_eff: w1,
            a1,
            w2_eff: w2,
            a2,
            enc_tanh,
            angles,
            feat,
            combine,
            probs,
            q,
        })
    }

    /// Distribution over atoms for a single observation.
    pub fn dist_forward(&self, obs: &[f64], mode: Mode) -> Result<DistOutput, NetError> {
        let x = ArrayView2::from_shape((1, obs.len()), obs)
            .map_err(|_| NetError::InputDim {
                got: obs.len(),
                expected: self.config.input_dim,
            })?;
        let trace = self.forward_trace(x, mode)?;
        Ok(DistOutput {
            probs: trace
                .probs
                .index_axis(Axis(0), 0)
                .to_owned(),
        })
    }

    pub fn q_values(&self, obs: &[f64], mode: Mode) -> Result<Vec<f64>, NetError> {
        Ok(self.dist_forward(obs, mode)?.q_values(&self.support))
    }

    pub fn q_batch(&self, x: ArrayView2<f64>, mode: Mode) -> Result<Array2<f64>, NetError> {
        Ok(self.forward_trace(x, mode)?.q)
    }

    /// Probability rows `probs[b, actions[b], :]` for a batch, e.g. the target
    /// network's distribution at the double-DQN argmax.
    pub fn dist_rows(
        &self,
        x: ArrayView2<f64>,
        actions: &[usize],
        mode: Mode,
    ) -> Result<Array2<f64>, NetError> {
        let trace = self.forward_trace(x, mode)?;
        let mut rows = Array2::zeros((actions.len(), self.config.n_atoms));
        for (b, &a) in actions.iter().enumerate() {
            for j in 0..self.config.n_atoms {
                rows[(b, j)] = trace.probs[(b, a, j)];
            }
        }
        Ok(rows)
    }

    /// Backpropagates from per-(sample, chosen action) probability gradients
    /// (`dprobs_rows`) or, in logit-space CE, directly from logit gradients.
    pub(crate) fn backward(
        &mut self,
        trace: &QTrace,
        actions: &[usize],
        upstream_rows: &Array2<f64>,
        upstream_is_dlogits: bool,
    ) -> Result<(), NetError> {
        let batch = trace.x.nrows();
        let (n_actions, n_atoms) = (self.config.num_actions, self.config.n_atoms);

        // Gradients w.r.t. the two head outputs.
        let mut dhv = Array2::zeros((batch, n_atoms));
        let mut dha = Array2::zeros((batch, n_actions * n_atoms));

        match &trace.combine {
            CombineTrace::LogitSpace => {
                let mut dlogit = vec![0.0; n_atoms];
                for (b, &act) in actions.iter().enumerate() {
                    let probs_row = trace.probs.slice(ndarray::s![b, act, ..]);
                    let up = upstream_rows.row(b);
                    if upstream_is_dlogits {
                        dlogit.copy_from_slice(up.as_slice().unwrap());
                    } else {
                        softmax_backward_row(
                            probs_row.as_slice().unwrap(),
                            up.as_slice().unwrap(),
                            &mut dlogit,
                        );
                    }
                    // combined[a][j] = hv[j] + ha[a][j] - mean_a' ha[a'][j], and only
                    // the chosen action's row carries upstream gradient.
                    for (j, &dl) in dlogit.iter().enumerate() {
                        dhv[(b, j)] += dl;
                        for a in 0..n_actions {
                            let indicator = if a == act { 1.0 } else { 0.0 };
                            dha[(b, a * n_atoms + j)] += (indicator - 1.0 / n_actions as f64) * dl;
                        }
                    }
                }
            }
            CombineTrace::PostSoftmax {
                v_soft,
                a_soft,
                y,
                row_sum,
            } => {
                if upstream_is_dlogits {
                    return Err(NetError::BatchShape(
                        "logit upstream is only defined for logit-space dueling".into(),
                    ));
                }
                for (b, &act) in actions.iter().enumerate() {
                    // Renormalization: p_j = max(y_j, 0) / S.
                    let s = row_sum[(b, act)];
                    let dot: f64 = (0..n_atoms)
                        .map(|j| upstream_rows[(b, j)] * trace.probs[(b, act, j)])
                        .sum();
                    let mut dy = vec![0.0; n_atoms];
                    for (j, dyj) in dy.iter_mut().enumerate() {
                        if y[(b, act, j)] > 0.0 {
                            *dyj = (upstream_rows[(b, j)] - dot) / s;
                        }
                    }
                    // y[a][j] = v_soft[j] + a_soft[a][j] - mean_a' a_soft[a'][j].
                    let mut dv_soft = vec![0.0; n_atoms];
                    let mut da_soft = vec![0.0; n_actions * n_atoms];
                    for (j, &dyj) in dy.iter().enumerate() {
                        dv_soft[j] += dyj;
                        for a in 0..n_actions {
                            let indicator = if a == act { 1.0 } else { 0.0 };
                            da_soft[a * n_atoms + j] +=
                                (indicator - 1.0 / n_actions as f64) * dyj;
                        }
                    }
                    let mut out = vec![0.0; n_atoms];
                    softmax_backward_row(v_soft.row(b).as_slice().unwrap(), &dv_soft, &mut out);
                    for (j, &o) in out.iter().enumerate() {
                        dhv[(b, j)] += o;
                    }
                    for a in 0..n_actions {
                        let probs_row: Vec<f64> =
                            (0..n_atoms).map(|j| a_soft[(b, a, j)]).collect();
                        softmax_backward_row(
                            &probs_row,
                            &da_soft[a * n_atoms..(a + 1) * n_atoms],
                            &mut out,
                        );
                        for (j, &o) in out.iter().enumerate() {
                            dha[(b, a * n_atoms + j)] += o;
                        }
                    }
                }
            }
        }

        let dfeat = self.head_v.backward(&trace.feat, &dhv)
            + self.head_a.backward(&trace.feat, &dha);

        let dangles = match (&self.config.feature, &mut self.feature) {
            (FeatureKind::Quantum, _) => {
                let mut dangles = Array2::zeros(trace.angles.raw_dim());
                for b in 0..batch {
                    let av = AngleVector::new(&self.spec, trace.angles.row(b).to_vec())?;
                    let g = gradient(&self.spec, &av, dfeat.row(b).as_slice().unwrap())?;
                    for (k, gk) in g.into_iter().enumerate() {
                        dangles[(b, k)] = gk;
                    }
                }
                dangles
            }
            (FeatureKind::DenseTanh, Some(layer)) => {
                let mut dpre = dfeat;
                dpre.zip_mut_with(&trace.feat, |d, &t| *d *= 1.0 - t * t);
                layer.backward(&trace.angles, &dpre)
            }
            (FeatureKind::DenseTanh, None) => unreachable!(),
        };

        // angles = angle_scale * tanh(pre): d(pre) = d(angles) * scale * (1 - tanh^2).
        let mut denc = dangles;
        denc.zip_mut_with(&trace.enc_tanh, |d, &t| {
            *d *= self.config.angle_scale * (1.0 - t * t);
        });
        let da2 = self.encoder.backward(&trace.a2, &denc);

        let dz2 = relu_backward(&da2, &trace.a2);
        let da1 = self.l2.backward(&trace.a1, &dz2, trace.mode, &trace.w2_eff);
        let dz1 = relu_backward(&da1, &trace.a1);
        let _ = self.l1.backward(&trace.x, &dz1, trace.mode, &trace.w1_eff);
        Ok(())
    }

    pub(crate) fn zero_grads(&mut self) {
        for p in self.p2_iter_mut() {
            p.zero_grad();
        }
        for p in self.p1_iter_mut() {
            p.zero_grad();
        }
    }

    pub(crate) fn grad_norm_sqr(&self) -> f64 {
        let mut total = 0.0;
        total += self.l1.w_mu.grad_norm_sqr() + self.l1.w_sigma.grad_norm_sqr();
        total += self.l1.b_mu.grad_norm_sqr() + self.l1.b_sigma.grad_norm_sqr();
        total += self.l2.w_mu.grad_norm_sqr() + self.l2.w_sigma.grad_norm_sqr();
        total += self.l2.b_mu.grad_norm_sqr() + self.l2.b_sigma.grad_norm_sqr();
        total += self.encoder.w.grad_norm_sqr() + self.encoder.b.grad_norm_sqr();
        if let Some(f) = &self.feature {
            total += f.w.grad_norm_sqr() + f.b.grad_norm_sqr();
        }
        total += self.head_v.w.grad_norm_sqr() + self.head_v.b.grad_norm_sqr();
        total += self.head_a.w.grad_norm_sqr() + self.head_a.b.grad_norm_sqr();
        total
    }

    pub(crate) fn scale_grads(&mut self, k: f64) {
        for p in self.p2_iter_mut() {
            p.scale_grad(k);
        }
        for p in self.p1_iter_mut() {
            p.scale_grad(k);
        }
    }

    pub(crate) fn adam_step_all(&mut self, t: u64, hp: &AdamHyper) {
        for p in self.p2_iter_mut() {
            p.adam_step(t, hp);
        }
        for p in self.p1_iter_mut() {
            p.adam_step(t, hp);
        }
    }

    fn p2_iter_mut(&mut self) -> Vec<&mut crate::param::P2> {
        let mut v = vec![
            &mut self.l1.w_mu,
            &mut self.l1.w_sigma,
            &mut self.l2.w_mu,
            &mut self.l2.w_sigma,
            &mut self.encoder.w,
        ];
        if let Some(f) = &mut self.feature {
            v.push(&mut f.w);
        }
        v.push(&mut self.head_v.w);
        v.push(&mut self.head_a.w);
        v
    }

    fn p1_iter_mut(&mut self) -> Vec<&mut crate::param::P1> {
        let mut v = vec![
            &mut self.l1.b_mu,
            &mut self.l1.b_sigma,
            &mut self.l2.b_mu,
            &mut self.l2.b_sigma,
            &mut self.encoder.b,
        ];
        if let Some(f) = &mut self.feature {
            v.push(&mut f.b);
        }
        v.push(&mut self.head_v.b);
        v.push(&mut self.head_a.b);
        v
    }

    /// Visits every trainable scalar in a stable order (matrices first, then
    /// biases, matching `grads_flat`).
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for p in self.p2_iter_mut() {
            for v in p.v.iter_mut() {
                f(v);
            }
        }
        for p in self.p1_iter_mut() {
            for v in p.v.iter_mut() {
                f(v);
            }
        }
    }

    /// Current gradients in `for_each_param_mut` order.
    pub fn grads_flat(&mut self) -> Vec<f64> {
        let mut out = Vec::new();
        for p in self.p2_iter_mut() {
            out.extend(p.g.iter().copied());
        }
        for p in self.p1_iter_mut() {
            out.extend(p.g.iter().copied());
        }
        out
    }

    pub fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.for_each_param_mut(|_| n += 1);
        n
    }

    pub(crate) fn chosen_q(trace: &QTrace, actions: &[usize]) -> Vec<f64> {
        actions
            .iter()
            .enumerate()
            .map(|(b, &a)| trace.q[(b, a)])
            .collect()
    }

    pub(crate) fn probs_row(trace: &QTrace, b: usize, a: usize) -> Array1<f64> {
        trace.probs.slice(ndarray::s![b, a, ..]).to_owned()
    }
}
