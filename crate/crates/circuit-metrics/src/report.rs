use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use qcircuit::{CircuitSpec, Topology};

use crate::entanglement::average_mw;
use crate::error::MetricsError;
use crate::expressibility::expressibility;

/// One topology's scores under a shared budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyRow {
    pub topology: Topology,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub kl: f64,
    pub mean_mw: f64,
    pub std_mw: f64,
    pub n_pairs: usize,
    pub n_states: usize,
    pub seed: u64,
}

/// Scores every topology with identical sample budgets and seed, ranked by KL
/// ascending (most expressible first).
pub fn topology_report(
    n_qubits: usize,
    n_layers: usize,
    n_pairs: usize,
    n_states: usize,
    seed: u64,
) -> Result<Vec<TopologyRow>, MetricsError> {
    let mut rows = Vec::with_capacity(Topology::ALL.len());
    for &topology in &Topology::ALL {
        let spec = CircuitSpec::new(n_qubits, n_layers, topology)?;
        let expr = expressibility(&spec, n_pairs, seed)?;
        let ent = average_mw(&spec, n_states, seed)?;
        rows.push(TopologyRow {
            topology,
            n_qubits,
            n_layers,
            kl: expr.kl,
            mean_mw: ent.mean_mw,
            std_mw: ent.std_mw,
            n_pairs,
            n_states,
            seed,
        });
    }
    rows.sort_by(|a, b| a.kl.total_cmp(&b.kl));
    Ok(rows)
}

/// CSV rendering with a fixed header and `{:.6}` numeric formatting.
pub fn report_csv(rows: &[TopologyRow]) -> String {
    let mut out = String::from("topology,n_q,n_l,kl,mean_mw,std_mw,n_pairs,n_states,seed\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{},{},{}",
            r.topology, r.n_qubits, r.n_layers, r.kl, r.mean_mw, r.std_mw, r.n_pairs, r.n_states, r.seed
        )
        .expect("string writes cannot fail");
    }
    out
}
