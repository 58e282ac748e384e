use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qcircuit::{prepare, AngleVector, CircuitSpec};

use crate::error::MetricsError;
use crate::histogram::{haar_bin_masses, FidelityHistogram, DEFAULT_BINS};

pub const DEFAULT_PAIRS: usize = 5000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpressibilityReport {
    pub spec: CircuitSpec,
    pub kl: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// ChaCha stream dedicated to one sample index; samples are independent of
/// evaluation order and can be recomputed in isolation.
pub(crate) fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn uniform_angles(spec: &CircuitSpec, rng: &mut ChaCha8Rng) -> AngleVector {
    let values: Vec<f64> = (0..spec.param_count())
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    AngleVector::new(spec, values).expect("angle count matches the spec")
}

/// Pairwise fidelities `|<psi(theta)|psi(phi)>|^2` of states prepared from
/// independent uniform angle draws.
pub fn fidelity_samples(
    spec: &CircuitSpec,
    n_pairs: usize,
    seed: u64,
) -> Result<Vec<f64>, MetricsError> {
    if n_pairs == 0 {
        return Err(MetricsError::InvalidArg("n_pairs must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(n_pairs);
    for i in 0..n_pairs {
        let mut rng = sample_rng(seed, i as u64);
        let a = prepare(spec, &uniform_angles(spec, &mut rng))?;
        let b = prepare(spec, &uniform_angles(spec, &mut rng))?;
        out.push(a.fidelity(&b)?);
    }
    Ok(out)
}

/// KL(P_circuit || P_Haar) in nats over histogram bins. Empty circuit bins
/// contribute zero; Haar masses are strictly positive on every bin.
pub fn expressibility_kl(hist: &FidelityHistogram, n_qubits: usize) -> Result<f64, MetricsError> {
    let p = hist.masses()?;
    let q = haar_bin_masses(n_qubits, hist.bin_count());
    let mut kl = 0.0;
    for (pi, qi) in p.into_iter().zip(q) {
        if pi > 0.0 {
            kl += pi * (pi / qi).ln();
        }
    }
    Ok(kl)
}

/// Samples fidelities, bins them, and reduces to the KL score.
pub fn expressibility(
    spec: &CircuitSpec,
    n_pairs: usize,
    seed: u64,
) -> Result<ExpressibilityReport, MetricsError> {
    let samples = fidelity_samples(spec, n_pairs, seed)?;
    let mut hist = FidelityHistogram::new(DEFAULT_BINS);
    hist.add_all(&samples);
    Ok(ExpressibilityReport {
        spec: *spec,
        kl: expressibility_kl(&hist, spec.n_qubits)?,
        n_samples: n_pairs,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcircuit::Topology;

    #[test]
    fn self_fidelity_is_one_and_samples_stay_in_range() {
        let spec = CircuitSpec::new(3, 2, Topology::Ring).unwrap();
        let mut rng = sample_rng(5, 0);
        let angles = uniform_angles(&spec, &mut rng);
        let state = prepare(&spec, &angles).unwrap();
        assert!((state.fidelity(&state).unwrap() - 1.0).abs() < 1e-12);

        for (i, f) in fidelity_samples(&spec, 2000, 9)
            .unwrap()
            .into_iter()
            .enumerate()
        {
            assert!((0.0..=1.0 + 1e-12).contains(&f), "pair {i}: {f}");
        }
    }

    #[test]
    fn fidelity_is_symmetric() {
        let spec = CircuitSpec::new(3, 2, Topology::Linear).unwrap();
        for i in 0..50 {
            let mut rng = sample_rng(31, i);
            let a = prepare(&spec, &uniform_angles(&spec, &mut rng)).unwrap();
            let b = prepare(&spec, &uniform_angles(&spec, &mut rng)).unwrap();
            assert!((a.fidelity(&b).unwrap() - b.fidelity(&a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn matching_haar_masses_give_zero_kl() {
        for n_q in 1..=4 {
            let masses = haar_bin_masses(n_q, DEFAULT_BINS);
            let hist = FidelityHistogram::from_masses(&masses, 5000.0);
            let kl = expressibility_kl(&hist, n_q).unwrap();
            assert!(kl.abs() < 1e-12, "n_q={n_q} kl={kl}");
        }
    }

    #[test]
    fn idle_circuit_spikes_to_the_closed_form_kl() {
        // Every fidelity is 1: all mass in the last bin, whose Haar mass for
        // N = 16 is (1/75)^15, so KL = 15 ln 75.
        let mut hist = FidelityHistogram::new(75);
        for _ in 0..1000 {
            hist.add(1.0);
        }
        let kl = expressibility_kl(&hist, 4).unwrap();
        let expected = 15.0 * 75.0f64.ln();
        assert!((kl - expected).abs() < 1e-9, "kl {kl} vs {expected}");
    }

    #[test]
    fn empty_histogram_is_rejected() {
        let hist = FidelityHistogram::new(75);
        assert!(matches!(
            expressibility_kl(&hist, 2),
            Err(MetricsError::EmptyHistogram)
        ));
    }

    #[test]
    fn sampling_is_reproducible_per_seed_and_index() {
        let spec = CircuitSpec::new(4, 2, Topology::Ring).unwrap();
        let a = fidelity_samples(&spec, 50, 123).unwrap();
        let b = fidelity_samples(&spec, 50, 123).unwrap();
        assert_eq!(a, b);
        // Prefixes agree: sample i depends only on (seed, i).
        let long = fidelity_samples(&spec, 80, 123).unwrap();
        assert_eq!(&long[..50], &a[..]);
        let c = fidelity_samples(&spec, 50, 124).unwrap();
        assert_ne!(a, c);
    }
}
