use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::param::{P1, P2};
use crate::Mode;

const SIGMA_INIT: f64 = 0.017;

fn uniform_init(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..=bound))
}

/// Plain affine layer, `y = x W^T + b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Linear {
    pub w: P2,
    pub b: P1,
}

impl Linear {
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let w = uniform_init(rng, out_dim, in_dim, bound);
        let b = Array1::from_shape_fn(out_dim, |_| rng.gen_range(-bound..=bound));
        Self {
            w: P2::new(w),
            b: P1::new(b),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.w.v.t()) + &self.b.v
    }

    /// Accumulates weight gradients and returns the input gradient.
    pub fn backward(&mut self, x: &Array2<f64>, dy: &Array2<f64>) -> Array2<f64> {
        self.w.g += &dy.t().dot(x);
        self.b.g += &dy.sum_axis(Axis(0));
        dy.dot(&self.w.v)
    }
}

/// Affine layer with learned per-parameter Gaussian noise.
///
/// In train mode the effective weights are `w_mu + w_sigma * eps_w` where every
/// entry of `eps_w` is an independent standard normal, redrawn by
/// [`NoisyLinear::resample`]; eval mode uses the means only. Fresh layers carry
/// zero noise until the first resample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct NoisyLinear {
    pub w_mu: P2,
    pub w_sigma: P2,
    pub b_mu: P1,
    pub b_sigma: P1,
    #[serde(skip, default = "empty2")]
    pub eps_w: Array2<f64>,
    #[serde(skip, default = "empty1")]
    pub eps_b: Array1<f64>,
}

fn empty2() -> Array2<f64> {
    Array2::zeros((0, 0))
}

fn empty1() -> Array1<f64> {
    Array1::zeros(0)
}

impl NoisyLinear {
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let w_mu = uniform_init(rng, out_dim, in_dim, bound);
        let b_mu = Array1::from_shape_fn(out_dim, |_| rng.gen_range(-bound..=bound));
        Self {
            w_mu: P2::new(w_mu),
            w_sigma: P2::new(Array2::from_elem((out_dim, in_dim), SIGMA_INIT)),
            b_mu: P1::new(b_mu),
            b_sigma: P1::new(Array1::from_elem(out_dim, SIGMA_INIT)),
            eps_w: Array2::zeros((out_dim, in_dim)),
            eps_b: Array1::zeros(out_dim),
        }
    }

    /// Restores zeroed noise buffers after deserialization.
    pub fn ensure_noise_shape(&mut self) {
        if self.eps_w.raw_dim() != self.w_mu.v.raw_dim() {
            self.eps_w = Array2::zeros(self.w_mu.v.raw_dim());
            self.eps_b = Array1::zeros(self.b_mu.v.raw_dim());
        }
    }

    pub fn resample(&mut self, rng: &mut ChaCha8Rng) {
        self.eps_w.mapv_inplace(|_| rng.sample(StandardNormal));
        self.eps_b.mapv_inplace(|_| rng.sample(StandardNormal));
    }

    /// Materialized effective weights for `mode`.
    pub fn effective(&self, mode: Mode) -> (Array2<f64>, Array1<f64>) {
        match mode {
            Mode::Eval => (self.w_mu.v.clone(), self.b_mu.v.clone()),
            Mode::Train => (
                &self.w_mu.v + &(&self.w_sigma.v * &self.eps_w),
                &self.b_mu.v + &(&self.b_sigma.v * &self.eps_b),
            ),
        }
    }

    /// Accumulates gradients through the sampled (fixed) noise; the sigma gradient
    /// is the mu gradient scaled elementwise by the drawn noise.
    pub fn backward(
        &mut self,
        x: &Array2<f64>,
        dy: &Array2<f64>,
        mode: Mode,
        w_eff: &Array2<f64>,
    ) -> Array2<f64> {
        let dw = dy.t().dot(x);
        let db = dy.sum_axis(Axis(0));
        if mode == Mode::Train {
            self.w_sigma.g += &(&dw * &self.eps_w);
            self.b_sigma.g += &(&db * &self.eps_b);
        }
        self.w_mu.g += &dw;
        self.b_mu.g += &db;
        dy.dot(w_eff)
    }
}

pub(crate) fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

/// Gradient gate of relu, using the activation itself as the mask.
pub(crate) fn relu_backward(dy: &Array2<f64>, activated: &Array2<f64>) -> Array2<f64> {
    let mut dx = dy.clone();
    dx.zip_mut_with(activated, |d, &a| {
        if a <= 0.0 {
            *d = 0.0;
        }
    });
    dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_sigma_makes_train_equal_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut layer = NoisyLinear::init(4, 3, &mut rng);
        layer.w_sigma.v.fill(0.0);
        layer.b_sigma.v.fill(0.0);
        layer.resample(&mut rng);
        let x = Array2::from_shape_fn((2, 4), |(i, j)| (i + j) as f64 * 0.1);
        let (wt, bt) = layer.effective(Mode::Train);
        let (we, be) = layer.effective(Mode::Eval);
        assert_eq!(x.dot(&wt.t()) + &bt, x.dot(&we.t()) + &be);
    }

    #[test]
    fn eval_mode_ignores_sampled_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut layer = NoisyLinear::init(4, 3, &mut rng);
        let (w_before, _) = layer.effective(Mode::Eval);
        layer.resample(&mut rng);
        let (w_after, _) = layer.effective(Mode::Eval);
        assert_eq!(w_before, w_after);
        let (w_train, _) = layer.effective(Mode::Train);
        assert_ne!(w_train, w_after);
    }

    #[test]
    fn sigma_init_is_constant_and_mu_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layer = NoisyLinear::init(16, 8, &mut rng);
        assert!(layer.w_sigma.v.iter().all(|&s| s == 0.017));
        assert!(layer.b_sigma.v.iter().all(|&s| s == 0.017));
        let bound = 1.0 / 4.0;
        assert!(layer.w_mu.v.iter().all(|&w| w.abs() <= bound));
    }

    #[test]
    fn linear_backward_matches_hand_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut layer = Linear::init(2, 2, &mut rng);
        layer.w.v.assign(&ndarray::arr2(&[[1.0, 2.0], [3.0, 4.0]]));
        layer.b.v.assign(&ndarray::arr1(&[0.5, -0.5]));
        let x = ndarray::arr2(&[[1.0, -1.0]]);
        let y = layer.forward(&x);
        assert_eq!(y, ndarray::arr2(&[[-0.5, -1.5]]));

        let dy = ndarray::arr2(&[[1.0, 1.0]]);
        let dx = layer.backward(&x, &dy);
        assert_eq!(dx, ndarray::arr2(&[[4.0, 6.0]]));
        assert_eq!(layer.w.g, ndarray::arr2(&[[1.0, -1.0], [1.0, -1.0]]));
        assert_eq!(layer.b.g, ndarray::arr1(&[1.0, 1.0]));
    }

    #[test]
    fn noise_resampling_is_seeded() {
        let mut rng_a = ChaCha8Rng::seed_from_u64(5);
        let mut rng_b = ChaCha8Rng::seed_from_u64(5);
        let mut a = NoisyLinear::init(3, 3, &mut rng_a);
        let mut b = NoisyLinear::init(3, 3, &mut rng_b);
        a.resample(&mut rng_a);
        b.resample(&mut rng_b);
        assert_eq!(a.eps_w, b.eps_w);
        assert_eq!(a.eps_b, b.eps_b);
    }
}
