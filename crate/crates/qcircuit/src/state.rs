use num_complex::Complex64;

use crate::error::CircuitError;

const NORM_TOLERANCE: f64 = 1e-9;

/// Dense statevector over up to 8 qubits.
///
/// Qubit 0 occupies the most significant bit of the amplitude index. All gate
/// kernels mutate in place and preserve the norm exactly up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct QStateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl QStateVector {
    /// The computational basis state `|0..0>`.
    pub fn zero_state(n_qubits: usize) -> Result<Self, CircuitError> {
        if n_qubits == 0 || n_qubits > 8 {
            return Err(CircuitError::QubitCount(n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps explicit amplitudes; the vector must be a normalized power-of-two list.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, CircuitError> {
        let len = amps.len();
        if !(2..=256).contains(&len) || !len.is_power_of_two() {
            return Err(CircuitError::AmplitudeLength(len));
        }
        let state = Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(CircuitError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, CircuitError> {
        if self.n_qubits != other.n_qubits {
            return Err(CircuitError::QubitMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64, CircuitError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn qubit_mask(&self, qubit: usize) -> usize {
        assert!(qubit < self.n_qubits, "qubit {qubit} out of range");
        1 << (self.n_qubits - 1 - qubit)
    }

    fn apply_one_qubit(
        &mut self,
        qubit: usize,
        u00: Complex64,
        u01: Complex64,
        u10: Complex64,
        u11: Complex64,
    ) {
        let mask = self.qubit_mask(qubit);
        for base in 0..self.amps.len() {
            if base & mask == 0 {
                let paired = base | mask;
                let a = self.amps[base];
                let b = self.amps[paired];
                self.amps[base] = u00 * a + u01 * b;
                self.amps[paired] = u10 * a + u11 * b;
            }
        }
    }

    pub fn apply_h(&mut self, qubit: usize) {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_one_qubit(qubit, s, s, s, -s);
    }

    /// `RX(theta) = exp(-i theta X / 2)`.
    pub fn apply_rx(&mut self, qubit: usize, theta: f64) {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        self.apply_one_qubit(qubit, c, s, s, c);
    }

    /// `RZ(theta) = exp(-i theta Z / 2)`.
    pub fn apply_rz(&mut self, qubit: usize, theta: f64) {
        let mask = self.qubit_mask(qubit);
        let lo = Complex64::from_polar(1.0, -theta / 2.0);
        let hi = Complex64::from_polar(1.0, theta / 2.0);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if idx & mask == 0 { lo } else { hi };
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target, "cnot needs distinct qubits");
        let cm = self.qubit_mask(control);
        let tm = self.qubit_mask(target);
        for idx in 0..self.amps.len() {
            if idx & cm != 0 && idx & tm == 0 {
                self.amps.swap(idx, idx | tm);
            }
        }
    }

    /// Pauli-Z expectation of one qubit, in `[-1, 1]`.
    pub fn expect_z(&self, qubit: usize) -> f64 {
        let mask = self.qubit_mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .map(|(idx, amp)| {
                let sign = if idx & mask == 0 { 1.0 } else { -1.0 };
                sign * amp.norm_sqr()
            })
            .sum()
    }

    /// Z expectations of every qubit, in qubit order.
    pub fn expect_z_all(&self) -> Vec<f64> {
        (0..self.n_qubits).map(|q| self.expect_z(q)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_state_is_normalized_basis_zero() {
        let s = QStateVector::zero_state(3).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.expect_z_all(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn from_amplitudes_rejects_bad_input() {
        assert!(QStateVector::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
        assert!(QStateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(QStateVector::from_amplitudes(vec![c(1.0, 0.0), c(0.0, 0.0)]).is_ok());
    }

    #[test]
    fn hadamard_splits_and_recombines() {
        let mut s = QStateVector::zero_state(1).unwrap();
        s.apply_h(0);
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(s.expect_z(0).abs() < 1e-15);
        s.apply_h(0);
        assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rx_pi_flips_a_qubit() {
        let mut s = QStateVector::zero_state(2).unwrap();
        s.apply_rx(0, PI);
        // exp(-i pi X / 2) = -i X, so |00> -> -i |10>.
        assert!((s.amplitudes()[2] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((s.expect_z(0) + 1.0).abs() < 1e-15);
        assert!((s.expect_z(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rz_leaves_populations_alone() {
        let mut s = QStateVector::zero_state(1).unwrap();
        s.apply_h(0);
        s.apply_rz(0, 1.234);
        assert!((s.amplitudes()[0].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.expect_z(0).abs() < 1e-15);
    }

    #[test]
    fn cnot_respects_the_msb_convention() {
        // Qubit 0 is the MSB: flipping it moves |00> to index 2.
        let mut s = QStateVector::zero_state(2).unwrap();
        s.apply_rx(0, PI); // state ~ |10>
        s.apply_cnot(0, 1); // -> |11>
        assert!((s.amplitudes()[3].norm() - 1.0).abs() < 1e-15);

        // Control clear: nothing happens.
        let mut s = QStateVector::zero_state(2).unwrap();
        s.apply_cnot(0, 1);
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_state_reads_zero_z_on_both_qubits() {
        let mut s = QStateVector::zero_state(2).unwrap();
        s.apply_h(0);
        s.apply_cnot(0, 1);
        let amps = s.amplitudes();
        assert!((amps[0].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amps[3].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(s.expect_z(0), 0.0);
        assert_eq!(s.expect_z(1), 0.0);

        let built = QStateVector::from_amplitudes(vec![
            c(FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        assert!((s.fidelity(&built).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inner_product_requires_matching_sizes() {
        let a = QStateVector::zero_state(2).unwrap();
        let b = QStateVector::zero_state(3).unwrap();
        assert!(a.inner(&b).is_err());
    }
}
