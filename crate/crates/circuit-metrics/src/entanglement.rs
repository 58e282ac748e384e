use serde::{Deserialize, Serialize};

use qcircuit::{prepare, CircuitSpec, QStateVector};

use crate::error::MetricsError;
use crate::expressibility::{sample_rng, uniform_angles};

pub const DEFAULT_MW_SAMPLES: usize = 2000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub spec: CircuitSpec,
    pub mean_mw: f64,
    /// Population standard deviation over the sampled values.
    pub std_mw: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Meyer-Wallach global entanglement `Q = 2 (1 - (1/n) sum_k Tr rho_k^2)`,
/// with each single-qubit purity taken from the partial trace over the rest.
pub fn meyer_wallach(state: &QStateVector) -> f64 {
    let n = state.n_qubits();
    let amps = state.amplitudes();
    let mut purity_sum = 0.0;
    for q in 0..n {
        // Qubit 0 is the most significant bit of the amplitude index.
        let mask = 1usize << (n - 1 - q);
        let mut rho00 = 0.0;
        let mut rho11 = 0.0;
        let mut rho01 = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..amps.len() {
            if i & mask == 0 {
                let a0 = amps[i];
                let a1 = amps[i | mask];
                rho00 += a0.norm_sqr();
                rho11 += a1.norm_sqr();
                rho01 += a0 * a1.conj();
            }
        }
        purity_sum += rho00 * rho00 + rho11 * rho11 + 2.0 * rho01.norm_sqr();
    }
    2.0 * (1.0 - purity_sum / n as f64)
}

/// Mean and spread of Meyer-Wallach entanglement over uniform angle draws.
pub fn average_mw(
    spec: &CircuitSpec,
    n_samples: usize,
    seed: u64,
) -> Result<EntanglementReport, MetricsError> {
    if n_samples == 0 {
        return Err(MetricsError::InvalidArg("n_samples must be >= 1".into()));
    }
    let mut values = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut rng = sample_rng(seed, i as u64);
        let state = prepare(spec, &uniform_angles(spec, &mut rng))?;
        values.push(meyer_wallach(&state));
    }
    let mean = values.iter().sum::<f64>() / n_samples as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n_samples as f64;
    Ok(EntanglementReport {
        spec: *spec,
        mean_mw: mean,
        std_mw: var.sqrt(),
        n_samples,
        seed,
    })
}
