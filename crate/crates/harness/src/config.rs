use std::fmt;
use std::path::Path;
use std::str::FromStr;

use agent::AgentConfig;
use hrap_env::{HrapConfig, ObsMode};
use qcircuit::{HadamardPlacement, Topology};
use qnet::{DuelingMode, FeatureKind, LossKind, NetworkConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

/// Which policy a run trains and evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Uniform-random policy; no learning machinery at all.
    Random,
    /// Plain MLP, scalar Q head, 1-step double-DQN target, uniform replay.
    Ddqn,
    /// Full agent with the quantum feature layer swapped for a dense tanh
    /// layer of the same width, keeping parameter counts comparable.
    Rainbow,
    #[default]
    Vqr,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Random, Variant::Ddqn, Variant::Rainbow, Variant::Vqr];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Variant::Random => "random",
            Variant::Ddqn => "ddqn",
            Variant::Rainbow => "rainbow",
            Variant::Vqr => "vqr",
        };
        f.write_str(name)
    }
}

impl FromStr for Variant {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Variant::Random),
            "ddqn" => Ok(Variant::Ddqn),
            "rainbow" => Ok(Variant::Rainbow),
            "vqr" => Ok(Variant::Vqr),
            other => Err(HarnessError::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// Network knobs exposed in the config file. Input width and action count are
/// not listed here; they follow from the environment shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkSection {
    pub hidden: [usize; 2],
    pub n_qubits: usize,
    pub n_layers: usize,
    pub topology: Topology,
    pub hadamard: HadamardPlacement,
    pub n_atoms: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub angle_scale: f64,
    pub dueling: DuelingMode,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            hidden: [128, 128],
            n_qubits: 4,
            n_layers: 2,
            topology: Topology::Ring,
            hadamard: HadamardPlacement::Initial,
            n_atoms: 51,
            v_min: -1.0,
            v_max: 0.0,
            angle_scale: std::f64::consts::PI,
            dueling: DuelingMode::LogitSpace,
        }
    }
}

impl NetworkSection {
    /// Fills in environment-derived dimensions and the variant-derived feature
    /// kind to produce a full network description.
    pub fn to_network_config(
        &self,
        input_dim: usize,
        num_actions: usize,
        feature: FeatureKind,
    ) -> NetworkConfig {
        NetworkConfig {
            input_dim,
            num_actions,
            hidden: self.hidden,
            n_qubits: self.n_qubits,
            n_layers: self.n_layers,
            topology: self.topology,
            hadamard: self.hadamard,
            feature,
            n_atoms: self.n_atoms,
            v_min: self.v_min,
            v_max: self.v_max,
            angle_scale: self.angle_scale,
            dueling: self.dueling,
        }
    }
}

/// One experiment: problem family, policy variant, budgets, and seeds.
///
/// Serialized as TOML; every field except `episodes` has a default, so a
/// minimal file is `episodes = 5000`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub variant: Variant,
    pub episodes: usize,
    #[serde(default = "default_eval_episodes")]
    pub eval_episodes: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_obs_mode")]
    pub obs_mode: ObsMode,
    #[serde(default)]
    pub hrap: HrapConfig,
    #[serde(default)]
    pub agent: AgentConfig,
    #[serde(default)]
    pub network: NetworkSection,
}

fn default_eval_episodes() -> usize {
    200
}

fn default_obs_mode() -> ObsMode {
    ObsMode::Augmented
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config.resolved())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.episodes == 0 {
            return Err(HarnessError::Config("episodes must be at least 1".into()));
        }
        if self.eval_episodes == 0 {
            return Err(HarnessError::Config("eval_episodes must be at least 1".into()));
        }
        self.hrap.validate()?;
        self.agent.validate()?;
        Ok(())
    }

    /// Normalizes variant-dependent fields so the snapshot records what the
    /// run actually does: ddqn is 1-step, uniform-replay, plain-TD.
    pub fn resolved(mut self) -> Self {
        if self.variant == Variant::Ddqn {
            self.agent.n_step = 1;
            self.agent.alpha = 0.0;
            self.agent.is_beta = None;
            self.agent.loss = LossKind::SquaredTd;
        }
        self
    }

    pub fn feature_kind(&self) -> FeatureKind {
        match self.variant {
            Variant::Rainbow => FeatureKind::DenseTanh,
            _ => FeatureKind::Quantum,
        }
    }
}

/// SHA-256 of the canonical JSON form, hex-encoded. Stable across runs on the
/// same build, so ablation rows can be traced back to exact settings.
pub fn config_hash(config: &ExperimentConfig) -> Result<String, HarnessError> {
    let canonical = serde_json::to_string(config)?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
