use serde::{Deserialize, Serialize};

use qcircuit::{CircuitSpec, HadamardPlacement, Topology};

use crate::error::NetError;

/// How the value and advantage streams are merged.
///
/// `LogitSpace` (default) combines raw logits as `V + (A - mean_a A)` and applies one
/// softmax per action row. `PostSoftmax` softmaxes each stream first, combines the
/// resulting distributions the same way, then clips negatives to zero and
/// renormalizes each row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DuelingMode {
    #[default]
    LogitSpace,
    PostSoftmax,
}

/// What sits between the angle encoder and the distribution heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    /// Variational circuit readout: angles in, one `<Z>` per qubit out.
    #[default]
    Quantum,
    /// Drop-in classical control: a dense layer of the same width with tanh.
    DenseTanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub num_actions: usize,
    /// Trunk widths; two noisy layers.
    pub hidden: [usize; 2],
    pub n_qubits: usize,
    pub n_layers: usize,
    pub topology: Topology,
    #[serde(default)]
    pub hadamard: HadamardPlacement,
    #[serde(default)]
    pub feature: FeatureKind,
    pub n_atoms: usize,
    pub v_min: f64,
    pub v_max: f64,
    /// Multiplier on the tanh encoder output; angles live in +-angle_scale.
    pub angle_scale: f64,
    #[serde(default)]
    pub dueling: DuelingMode,
}

impl NetworkConfig {
    /// Defaults sized for a given observation width and action count: 512x512
    /// trunk, 4-qubit 2-layer ring circuit, 51 atoms on [-1, 0].
    pub fn with_dims(input_dim: usize, num_actions: usize) -> Self {
        Self {
            input_dim,
            num_actions,
            hidden: [512, 512],
            n_qubits: 4,
            n_layers: 2,
            topology: Topology::Ring,
            hadamard: HadamardPlacement::Initial,
            feature: FeatureKind::Quantum,
            n_atoms: 51,
            v_min: -1.0,
            v_max: 0.0,
            angle_scale: std::f64::consts::PI,
            dueling: DuelingMode::LogitSpace,
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.input_dim == 0 || self.num_actions == 0 {
            return Err(NetError::InvalidConfig(
                "input_dim and num_actions must be positive".into(),
            ));
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return Err(NetError::InvalidConfig("hidden widths must be positive".into()));
        }
        if self.n_qubits == 0 || self.n_qubits > 8 {
            return Err(NetError::InvalidConfig(format!(
                "n_qubits {} outside 1..=8",
                self.n_qubits
            )));
        }
        if self.n_layers == 0 {
            return Err(NetError::InvalidConfig("n_layers must be at least 1".into()));
        }
        if self.n_atoms < 2 {
            return Err(NetError::InvalidConfig("need at least two atoms".into()));
        }
        if !(self.v_min < self.v_max) {
            return Err(NetError::InvalidConfig(format!(
                "need v_min < v_max, got [{}, {}]",
                self.v_min, self.v_max
            )));
        }
        if !self.angle_scale.is_finite() || self.angle_scale <= 0.0 {
            return Err(NetError::InvalidConfig("angle_scale must be positive".into()));
        }
        Ok(())
    }

    /// Number of encoder outputs, two angles per qubit per layer.
    pub fn angle_count(&self) -> usize {
        2 * self.n_qubits * self.n_layers
    }

    pub fn circuit_spec(&self) -> Result<CircuitSpec, NetError> {
        Ok(CircuitSpec::new(self.n_qubits, self.n_layers, self.topology)?
            .with_hadamard(self.hadamard))
    }

    /// Evenly spaced distribution support `z_j = v_min + j (v_max - v_min) / (N-1)`.
    pub fn support(&self) -> Vec<f64> {
        let delta = (self.v_max - self.v_min) / (self.n_atoms - 1) as f64;
        (0..self.n_atoms)
            .map(|j| self.v_min + j as f64 * delta)
            .collect()
    }
}
