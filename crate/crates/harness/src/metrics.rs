use std::fs;
use std::path::Path;

use circuit_metrics::{report_csv, topology_report, TopologyRow};

use crate::error::HarnessError;

pub const METRICS_FILE: &str = "metrics.csv";

/// Expressibility and entanglement scores for all four topologies at one
/// circuit shape, written as `metrics.csv`.
pub fn run_metrics(
    n_qubits: usize,
    n_layers: usize,
    pairs: usize,
    mw_samples: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<TopologyRow>, HarnessError> {
    let rows = topology_report(n_qubits, n_layers, pairs, mw_samples, seed)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(METRICS_FILE), report_csv(&rows))?;
    Ok(rows)
}
