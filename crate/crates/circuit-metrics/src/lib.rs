//! Expressibility and entanglement scores for variational circuit shapes.
//!
//! Expressibility is the KL divergence between the fidelity distribution of
//! randomly parameterized circuit pairs and the Haar closed form (lower is
//! better); entanglement is the Meyer-Wallach measure averaged over random
//! parameterizations. [`topology_report`] scores all entangler layouts under
//! one budget and renders the ranking as CSV.
//!
//! Sampling uses one ChaCha stream per sample index, so results are
//! reproducible and independent of evaluation order.

mod entanglement;
mod error;
mod expressibility;
mod histogram;
mod report;

pub use entanglement::{average_mw, meyer_wallach, EntanglementReport, DEFAULT_MW_SAMPLES};
pub use error::MetricsError;
pub use expressibility::{
    expressibility, expressibility_kl, fidelity_samples, ExpressibilityReport, DEFAULT_PAIRS,
};
pub use histogram::{haar_bin_masses, FidelityHistogram, DEFAULT_BINS};
pub use report::{report_csv, topology_report, TopologyRow};
