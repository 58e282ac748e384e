use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Entangler wiring between the rotation layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Linear,
    Ring,
    Star,
    AllToAll,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::Linear,
        Topology::Ring,
        Topology::Star,
        Topology::AllToAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Linear => "linear",
            Topology::Ring => "ring",
            Topology::Star => "star",
            Topology::AllToAll => "all-to-all",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Topology::Linear),
            "ring" => Ok(Topology::Ring),
            "star" => Ok(Topology::Star),
            "all-to-all" | "alltoall" | "all_to_all" => Ok(Topology::AllToAll),
            other => Err(format!(
                "unknown topology `{other}` (expected linear, ring, star or all-to-all)"
            )),
        }
    }
}

/// `(control, target)` CNOT list of a topology, in application order.
///
/// Ring wraps around and therefore needs at least two qubits; on one qubit every
/// topology degenerates to an empty list.
pub fn entangler_pairs(topology: Topology, n_qubits: usize) -> Vec<(usize, usize)> {
    if n_qubits < 2 {
        return Vec::new();
    }
    match topology {
        Topology::Linear => (0..n_qubits - 1).map(|i| (i, i + 1)).collect(),
        Topology::Ring => (0..n_qubits).map(|i| (i, (i + 1) % n_qubits)).collect(),
        Topology::Star => (1..n_qubits).map(|j| (0, j)).collect(),
        Topology::AllToAll => {
            let mut pairs = Vec::with_capacity(n_qubits * (n_qubits - 1) / 2);
            for i in 0..n_qubits {
                for j in (i + 1)..n_qubits {
                    pairs.push((i, j));
                }
            }
            pairs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_lists_match_their_definitions() {
        assert_eq!(entangler_pairs(Topology::Linear, 4), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(
            entangler_pairs(Topology::Ring, 4),
            vec![(0, 1), (1, 2), (2, 3), (3, 0)]
        );
        assert_eq!(entangler_pairs(Topology::Ring, 2), vec![(0, 1), (1, 0)]);
        assert_eq!(entangler_pairs(Topology::Star, 4), vec![(0, 1), (0, 2), (0, 3)]);
        assert_eq!(
            entangler_pairs(Topology::AllToAll, 4),
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        );
    }

    #[test]
    fn single_qubit_has_no_entanglers() {
        for topology in Topology::ALL {
            assert!(entangler_pairs(topology, 1).is_empty());
        }
    }

    #[test]
    fn pair_counts_follow_the_closed_forms() {
        for n in 2..=8 {
            assert_eq!(entangler_pairs(Topology::Linear, n).len(), n - 1);
            assert_eq!(entangler_pairs(Topology::Ring, n).len(), n);
            assert_eq!(entangler_pairs(Topology::Star, n).len(), n - 1);
            assert_eq!(entangler_pairs(Topology::AllToAll, n).len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn names_round_trip_through_fromstr() {
        for topology in Topology::ALL {
            assert_eq!(topology.name().parse::<Topology>().unwrap(), topology);
        }
        assert!("triangle".parse::<Topology>().is_err());
    }
}
