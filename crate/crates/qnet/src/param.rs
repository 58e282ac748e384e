use ndarray::{Array1, Array2};
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::optim::AdamHyper;

/// Trainable matrix with its gradient and Adam moment buffers.
///
/// Only the values are serialized; buffers are rebuilt as zeros on load, so a
/// restored network evaluates identically but restarts its optimizer moments.
#[derive(Debug, Clone)]
pub(crate) struct P2 {
    pub v: Array2<f64>,
    pub g: Array2<f64>,
    pub m: Array2<f64>,
    pub s: Array2<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct P1 {
    pub v: Array1<f64>,
    pub g: Array1<f64>,
    pub m: Array1<f64>,
    pub s: Array1<f64>,
}

macro_rules! param_impl {
    ($name:ident, $arr:ty) => {
        impl $name {
            pub fn new(v: $arr) -> Self {
                let g = <$arr>::zeros(v.raw_dim());
                let m = g.clone();
                let s = g.clone();
                Self { v, g, m, s }
            }

            pub fn zero_grad(&mut self) {
                self.g.fill(0.0);
            }

            pub fn grad_norm_sqr(&self) -> f64 {
                self.g.iter().map(|x| x * x).sum()
            }

            pub fn scale_grad(&mut self, k: f64) {
                self.g.mapv_inplace(|x| x * k);
            }

            /// One Adam update with bias correction at step `t` (1-based).
            pub fn adam_step(&mut self, t: u64, hp: &AdamHyper) {
                let bc1 = 1.0 - hp.beta1.powi(t as i32);
                let bc2 = 1.0 - hp.beta2.powi(t as i32);
                for (((v, &g), m), s) in self
                    .v
                    .iter_mut()
                    .zip(self.g.iter())
                    .zip(self.m.iter_mut())
                    .zip(self.s.iter_mut())
                {
                    *m = hp.beta1 * *m + (1.0 - hp.beta1) * g;
                    *s = hp.beta2 * *s + (1.0 - hp.beta2) * g * g;
                    let m_hat = *m / bc1;
                    let s_hat = *s / bc2;
                    *v -= hp.lr * m_hat / (s_hat.sqrt() + hp.eps);
                }
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                self.v.serialize(serializer)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                Ok(Self::new(<$arr>::deserialize(deserializer)?))
            }
        }
    };
}

param_impl!(P2, Array2<f64>);
param_impl!(P1, Array1<f64>);
