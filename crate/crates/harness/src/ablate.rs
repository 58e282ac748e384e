use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qcircuit::Topology;
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, ExperimentConfig, Variant};
use crate::error::HarnessError;
use crate::run::run_train;

pub const ABLATION_FILE: &str = "ablation.csv";
pub const ABLATION_SUMMARY_FILE: &str = "ablation_summary.csv";

/// One trained topology-seed combination of the ablation grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationArm {
    pub topology: Topology,
    pub seed: u64,
    pub mean_reward: f64,
    pub reduction_pct: f64,
    pub config_hash: String,
    pub out_dir: PathBuf,
}

/// Trains one full run per topology and seed, with every arm sharing the
/// same instance streams per seed, then tabulates mean eval rewards.
///
/// Writes a per-arm table and a per-topology summary averaged over seeds.
pub fn run_ablation(
    base: &ExperimentConfig,
    topologies: &[Topology],
    seeds: &[u64],
    out_dir: &Path,
) -> Result<Vec<AblationArm>, HarnessError> {
    if topologies.is_empty() || seeds.is_empty() {
        return Err(HarnessError::Config(
            "ablation needs at least one topology and one seed".into(),
        ));
    }
    fs::create_dir_all(out_dir)?;
    let mut arms = Vec::with_capacity(topologies.len() * seeds.len());
    for &topology in topologies {
        for &seed in seeds {
            let mut config = base.clone();
            config.variant = Variant::Vqr;
            config.network.topology = topology;
            config.master_seed = seed;
            let config = config.resolved();
            let arm_dir = out_dir.join(format!("{topology}-s{seed}"));
            let record = run_train(&config, &arm_dir)?;
            arms.push(AblationArm {
                topology,
                seed,
                mean_reward: record.eval.mean_reward,
                reduction_pct: record.eval.reduction_pct,
                config_hash: config_hash(&config)?,
                out_dir: arm_dir,
            });
        }
    }

    let mut table = String::from("topology,seed,mean_reward,reduction_pct,config_hash\n");
    for arm in &arms {
        writeln!(
            table,
            "{},{},{:.6},{:.6},{}",
            arm.topology, arm.seed, arm.mean_reward, arm.reduction_pct, arm.config_hash
        )
        .expect("string writes cannot fail");
    }
    fs::write(out_dir.join(ABLATION_FILE), table)?;

    let mut summary = String::from("topology,mean_reward,reduction_pct\n");
    for &topology in topologies {
        let rows: Vec<&AblationArm> = arms.iter().filter(|a| a.topology == topology).collect();
        let n = rows.len() as f64;
        let mean_reward = rows.iter().map(|a| a.mean_reward).sum::<f64>() / n;
        let mean_reduction = rows.iter().map(|a| a.reduction_pct).sum::<f64>() / n;
        writeln!(summary, "{topology},{mean_reward:.6},{mean_reduction:.6}")
            .expect("string writes cannot fail");
    }
    fs::write(out_dir.join(ABLATION_SUMMARY_FILE), summary)?;
    Ok(arms)
}
