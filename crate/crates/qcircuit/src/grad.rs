use std::f64::consts::FRAC_PI_2;

use crate::circuit::{prepare, AngleVector, CircuitSpec};
use crate::error::CircuitError;

/// Parameter-shift gradient of the Z readout, contracted with `upstream`.
///
/// For every angle `k`, `d<Z_i>/d theta_k = (<Z_i>(theta_k + pi/2) -
/// <Z_i>(theta_k - pi/2)) / 2` holds exactly for RX/RZ rotations, so the result is
/// `g[k] = sum_i upstream[i] * d<Z_i>/d theta_k` with no truncation error. Costs two
/// circuit evaluations per parameter.
pub fn gradient(
    spec: &CircuitSpec,
    angles: &AngleVector,
    upstream: &[f64],
) -> Result<Vec<f64>, CircuitError> {
    if angles.len() != spec.param_count() {
        return Err(CircuitError::AngleCount {
            got: angles.len(),
            expected: spec.param_count(),
        });
    }
    if upstream.len() != spec.n_qubits {
        return Err(CircuitError::UpstreamLength {
            got: upstream.len(),
            expected: spec.n_qubits,
        });
    }

    let mut shifted = angles.clone();
    let mut grad = vec![0.0; spec.param_count()];
    for k in 0..spec.param_count() {
        let original = shifted.values()[k];

        shifted.values_mut()[k] = original + FRAC_PI_2;
        let plus = prepare(spec, &shifted)?;
        shifted.values_mut()[k] = original - FRAC_PI_2;
        let minus = prepare(spec, &shifted)?;
        shifted.values_mut()[k] = original;

        let mut g = 0.0;
        for (q, &u) in upstream.iter().enumerate() {
            g += u * (plus.expect_z(q) - minus.expect_z(q)) / 2.0;
        }
        grad[k] = g;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::expect_z;
    use crate::topology::Topology;

    /// Central finite difference of the contracted readout, the independent check
    /// the parameter-shift values are held against.
    fn fd_gradient(spec: &CircuitSpec, angles: &AngleVector, upstream: &[f64], h: f64) -> Vec<f64> {
        let contract = |a: &AngleVector| -> f64 {
            expect_z(spec, a)
                .unwrap()
                .iter()
                .zip(upstream)
                .map(|(z, u)| z * u)
                .sum()
        };
        let mut shifted = angles.clone();
        (0..spec.param_count())
            .map(|k| {
                let original = shifted.values()[k];
                shifted.values_mut()[k] = original + h;
                let plus = contract(&shifted);
                shifted.values_mut()[k] = original - h;
                let minus = contract(&shifted);
                shifted.values_mut()[k] = original;
                (plus - minus) / (2.0 * h)
            })
            .collect()
    }

    fn pseudo_angles(spec: &CircuitSpec, salt: u64) -> AngleVector {
        let values = (0..spec.param_count())
            .map(|k| {
                let x = salt
                    .wrapping_mul(6_364_136_223_846_793_005)
                    .wrapping_add(k as u64)
                    .wrapping_mul(2_862_933_555_777_941_757);
                (x >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU
            })
            .collect();
        AngleVector::new(spec, values).unwrap()
    }

    #[test]
    fn matches_central_differences_on_every_topology() {
        for (i, topology) in Topology::ALL.into_iter().enumerate() {
            let spec = CircuitSpec::new(3, 2, topology).unwrap();
            let angles = pseudo_angles(&spec, i as u64 + 1);
            let upstream: Vec<f64> = (0..3).map(|q| 0.5 + 0.25 * q as f64).collect();
            let exact = gradient(&spec, &angles, &upstream).unwrap();
            let approx = fd_gradient(&spec, &angles, &upstream, 1e-4);
            for (e, a) in exact.iter().zip(&approx) {
                assert!((e - a).abs() < 1e-6, "{topology}: {e} vs {a}");
            }
        }
    }

    #[test]
    fn zero_angles_have_zero_gradient() {
        // At theta = 0 the state is |+..+> and any single pi/2 shift keeps every
        // qubit on the equator, so all shifted readouts stay 0.
        let spec = CircuitSpec::new(4, 2, Topology::Ring).unwrap();
        let grad = gradient(&spec, &AngleVector::zeros(&spec), &[1.0; 4]).unwrap();
        assert!(grad.iter().all(|g| g.abs() < 1e-12), "{grad:?}");
    }

    #[test]
    fn validates_lengths() {
        let spec = CircuitSpec::new(2, 1, Topology::Linear).unwrap();
        let angles = AngleVector::zeros(&spec);
        assert!(matches!(
            gradient(&spec, &angles, &[1.0]),
            Err(CircuitError::UpstreamLength { .. })
        ));
        let other = CircuitSpec::new(2, 2, Topology::Linear).unwrap();
        assert!(gradient(&other, &angles, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn upstream_contraction_is_linear() {
        let spec = CircuitSpec::new(2, 1, Topology::Ring).unwrap();
        let angles = pseudo_angles(&spec, 9);
        let g1 = gradient(&spec, &angles, &[1.0, 0.0]).unwrap();
        let g2 = gradient(&spec, &angles, &[0.0, 1.0]).unwrap();
        let both = gradient(&spec, &angles, &[1.0, 1.0]).unwrap();
        for k in 0..spec.param_count() {
            assert!((g1[k] + g2[k] - both[k]).abs() < 1e-12);
        }
    }
}
