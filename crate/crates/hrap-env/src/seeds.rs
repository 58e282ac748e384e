//! Seed derivation for the deterministic RNG streams used across the workspace.
//!
//! Every stream is addressed as `(master, domain, index)` and mixed through
//! SplitMix64 so that streams for different domains and indices are statistically
//! independent. Training and evaluation draw from different domains, which keeps
//! their episode seed sequences disjoint.

pub const DOMAIN_TRAIN: u64 = 0x01;
pub const DOMAIN_EVAL: u64 = 0x02;
pub const DOMAIN_AGENT_INIT: u64 = 0x03;
pub const DOMAIN_AGENT_NOISE: u64 = 0x04;
pub const DOMAIN_AGENT_ACTION: u64 = 0x05;
pub const DOMAIN_REPLAY_SAMPLE: u64 = 0x06;
pub const DOMAIN_BASELINE_INSTANCE: u64 = 0x07;
pub const DOMAIN_BASELINE_ACTION: u64 = 0x08;
pub const DOMAIN_METRICS: u64 = 0x09;

/// SplitMix64 finalizer; full-avalanche mix of one 64-bit word.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for element `index` of the `(master, domain)` stream.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    let a = splitmix64(master ^ domain.wrapping_mul(0xA076_1D64_78BD_642F));
    splitmix64(a ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB))
}
