//! Statevector simulator for the layered variational circuit used by the Q-network.
//!
//! A circuit starts with a Hadamard on every qubit, then repeats `n_layers` of
//! per-qubit `RX`/`RZ` rotations followed by the CNOT pattern of one of four
//! entangler topologies. Readout is the Pauli-Z expectation of each qubit, and
//! gradients of those expectations come from the exact parameter-shift rule.
//!
//! Basis convention: amplitude index `b` carries qubit 0 as its most significant
//! bit, so `|q0 q1 .. q_{n-1}>` maps to `b = q0 * 2^(n-1) + .. + q_{n-1}`.

mod circuit;
mod error;
mod grad;
mod state;
mod topology;

pub use circuit::{circuit_diagram, expect_z, prepare, AngleVector, CircuitSpec, HadamardPlacement};
pub use error::CircuitError;
pub use grad::gradient;
pub use state::QStateVector;
pub use topology::{entangler_pairs, Topology};
