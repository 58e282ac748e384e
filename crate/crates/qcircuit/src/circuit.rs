use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::CircuitError;
use crate::state::QStateVector;
use crate::topology::{entangler_pairs, Topology};

/// Where the Hadamard wall sits.
///
/// `Initial` applies it once before the first layer and is the default;
/// `PerLayer` repeats it at the start of every layer and exists for ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HadamardPlacement {
    #[default]
    Initial,
    PerLayer,
}

/// Shape of one variational circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    /// Rotation layer count. Zero is permitted and leaves only the Hadamard wall,
    /// which is the unentangled reference circuit used by the metrics crate.
    /// One layer yields all-zero Z readouts for every angle choice: the wall
    /// absorbs the RX row and RZ keeps each qubit equatorial, so two layers are
    /// the minimum for angle-dependent readouts.
    pub n_layers: usize,
    pub topology: Topology,
    #[serde(default)]
    pub hadamard: HadamardPlacement,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, n_layers: usize, topology: Topology) -> Result<Self, CircuitError> {
        if n_qubits == 0 || n_qubits > 8 {
            return Err(CircuitError::QubitCount(n_qubits));
        }
        Ok(Self {
            n_qubits,
            n_layers,
            topology,
            hadamard: HadamardPlacement::Initial,
        })
    }

    pub fn with_hadamard(mut self, placement: HadamardPlacement) -> Self {
        self.hadamard = placement;
        self
    }

    /// Two rotation angles per qubit per layer.
    pub fn param_count(&self) -> usize {
        2 * self.n_qubits * self.n_layers
    }

    /// Angle index of `RX` on `qubit` in `layer`; layers are blocked together,
    /// RX angles first, then RZ angles.
    pub fn rx_index(&self, layer: usize, qubit: usize) -> usize {
        debug_assert!(layer < self.n_layers && qubit < self.n_qubits);
        layer * 2 * self.n_qubits + qubit
    }

    /// Angle index of `RZ` on `qubit` in `layer`.
    pub fn rz_index(&self, layer: usize, qubit: usize) -> usize {
        layer * 2 * self.n_qubits + self.n_qubits + qubit
    }

    pub fn entanglers(&self) -> Vec<(usize, usize)> {
        entangler_pairs(self.topology, self.n_qubits)
    }
}

/// Rotation angles for one circuit, stored in [`CircuitSpec::rx_index`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleVector {
    values: Vec<f64>,
}

impl AngleVector {
    pub fn new(spec: &CircuitSpec, values: Vec<f64>) -> Result<Self, CircuitError> {
        if values.len() != spec.param_count() {
            return Err(CircuitError::AngleCount {
                got: values.len(),
                expected: spec.param_count(),
            });
        }
        Ok(Self { values })
    }

    pub fn zeros(spec: &CircuitSpec) -> Self {
        Self {
            values: vec![0.0; spec.param_count()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

fn hadamard_wall(state: &mut QStateVector) {
    for q in 0..state.n_qubits() {
        state.apply_h(q);
    }
}

/// Runs the circuit on `|0..0>` and returns the final state.
pub fn prepare(spec: &CircuitSpec, angles: &AngleVector) -> Result<QStateVector, CircuitError> {
    if angles.len() != spec.param_count() {
        return Err(CircuitError::AngleCount {
            got: angles.len(),
            expected: spec.param_count(),
        });
    }
    let mut state = QStateVector::zero_state(spec.n_qubits)?;
    if spec.hadamard == HadamardPlacement::Initial {
        hadamard_wall(&mut state);
    }
    let pairs = spec.entanglers();
    let theta = angles.values();
    for layer in 0..spec.n_layers {
        if spec.hadamard == HadamardPlacement::PerLayer {
            hadamard_wall(&mut state);
        }
        for q in 0..spec.n_qubits {
            state.apply_rx(q, theta[spec.rx_index(layer, q)]);
        }
        for q in 0..spec.n_qubits {
            state.apply_rz(q, theta[spec.rz_index(layer, q)]);
        }
        for &(control, target) in &pairs {
            state.apply_cnot(control, target);
        }
    }
    Ok(state)
}

/// Z readout of the prepared circuit, one value per qubit.
pub fn expect_z(spec: &CircuitSpec, angles: &AngleVector) -> Result<Vec<f64>, CircuitError> {
    Ok(prepare(spec, angles)?.expect_z_all())
}

/// Stable text listing of the gate sequence, one line per stage.
pub fn circuit_diagram(spec: &CircuitSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "circuit: {} qubits, {} layers, {} topology",
        spec.n_qubits, spec.n_layers, spec.topology
    );
    let wall = (0..spec.n_qubits)
        .map(|q| format!("H q{q}"))
        .collect::<Vec<_>>()
        .join("  ");
    if spec.hadamard == HadamardPlacement::Initial {
        let _ = writeln!(out, "init: {wall}");
    }
    let pairs = spec.entanglers();
    for layer in 0..spec.n_layers {
        if spec.hadamard == HadamardPlacement::PerLayer {
            let _ = writeln!(out, "layer {layer} init: {wall}");
        }
        let rx = (0..spec.n_qubits)
            .map(|q| format!("RX(t{}) q{q}", spec.rx_index(layer, q)))
            .collect::<Vec<_>>()
            .join("  ");
        let rz = (0..spec.n_qubits)
            .map(|q| format!("RZ(t{}) q{q}", spec.rz_index(layer, q)))
            .collect::<Vec<_>>()
            .join("  ");
        let cx = pairs
            .iter()
            .map(|(c, t)| format!("CNOT q{c}->q{t}"))
            .collect::<Vec<_>>()
            .join("  ");
        let _ = writeln!(out, "layer {layer}: {rx}  {rz}  {cx}");
    }
    let _ = writeln!(out, "readout: <Z> on every qubit");
    out
}
