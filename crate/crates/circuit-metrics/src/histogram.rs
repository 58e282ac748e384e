use serde::{Deserialize, Serialize};

use crate::error::MetricsError;

pub const DEFAULT_BINS: usize = 75;

/// Equal-width histogram over fidelities in [0, 1].
///
/// Counts are kept as reals so a histogram can also hold exact fractional
/// reference masses (e.g. the Haar distribution itself) in tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityHistogram {
    bin_count: usize,
    counts: Vec<f64>,
    n_samples: f64,
}

impl FidelityHistogram {
    pub fn new(bin_count: usize) -> Self {
        assert!(bin_count > 0);
        Self {
            bin_count,
            counts: vec![0.0; bin_count],
            n_samples: 0.0,
        }
    }

    /// Histogram with prescribed per-bin masses scaled to `n_samples` counts.
    pub fn from_masses(masses: &[f64], n_samples: f64) -> Self {
        Self {
            bin_count: masses.len(),
            counts: masses.iter().map(|m| m * n_samples).collect(),
            n_samples,
        }
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn n_samples(&self) -> f64 {
        self.n_samples
    }

    /// Bin index of a fidelity; F = 1 lands in the last bin.
    pub fn bin_of(&self, fidelity: f64) -> usize {
        debug_assert!((0.0..=1.0 + 1e-12).contains(&fidelity));
        ((fidelity * self.bin_count as f64) as usize).min(self.bin_count - 1)
    }

    pub fn add(&mut self, fidelity: f64) {
        let bin = self.bin_of(fidelity);
        self.counts[bin] += 1.0;
        self.n_samples += 1.0;
    }

    pub fn add_all(&mut self, fidelities: &[f64]) {
        for &f in fidelities {
            self.add(f);
        }
    }

    /// Per-bin empirical probabilities.
    pub fn masses(&self) -> Result<Vec<f64>, MetricsError> {
        if self.n_samples <= 0.0 {
            return Err(MetricsError::EmptyHistogram);
        }
        Ok(self.counts.iter().map(|c| c / self.n_samples).collect())
    }
}

/// Haar bin masses from the closed-form fidelity density
/// `P(F) = (N-1)(1-F)^(N-2)` with `N = 2^n_qubits`: the mass of bin
/// `[lo, hi]` integrates to `(1-lo)^(N-1) - (1-hi)^(N-1)`.
pub fn haar_bin_masses(n_qubits: usize, bin_count: usize) -> Vec<f64> {
    let n = (1u64 << n_qubits) as f64;
    let exponent = n - 1.0;
    (0..bin_count)
        .map(|i| {
            let lo = i as f64 / bin_count as f64;
            let hi = (i + 1) as f64 / bin_count as f64;
            (1.0 - lo).powf(exponent) - (1.0 - hi).powf(exponent)
        })
        .collect()
}
