//! Hybrid Q-networks for the allocation environment.
//!
//! [`QNetwork`] is the distributional dueling network: a noisy two-layer trunk,
//! a tanh angle encoder, a variational-circuit readout (or a dense stand-in of
//! the same width), and value/advantage heads over a fixed support. [`DdqnNet`]
//! is the plain scalar-Q baseline. Both sit behind the [`Network`] enum, which
//! owns batch training: forward, analytic backward, global-norm clipping, and
//! a per-tensor Adam update.
//!
//! Exploration noise is sampled explicitly via [`Network::resample_noise`];
//! forward passes never draw randomness themselves, so repeated calls under a
//! fixed draw are deterministic.

use serde::{Deserialize, Serialize};

mod config;
mod ddqn;
mod error;
mod layers;
mod network;
mod optim;
mod param;
mod qnetwork;

pub use config::{DuelingMode, FeatureKind, NetworkConfig};
pub use ddqn::DdqnNet;
pub use error::NetError;
pub use network::{BatchTargets, LossKind, Network, TrainOutput};
pub use optim::{Adam, AdamHyper};
pub use qnetwork::{DistOutput, QNetwork};

/// Whether noisy layers add their sampled perturbation (train) or use means
/// only (eval).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Train,
    Eval,
}
