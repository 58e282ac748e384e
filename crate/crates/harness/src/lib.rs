//! Experiment harness for the allocation benchmark: seeded training and
//! evaluation runs over four policy variants, an entangler-topology ablation,
//! circuit metric reports, and the exhaustive oracle, all driven by one TOML
//! config and a master seed.
//!
//! Every output lands under a run directory with fixed names: `curve.csv`,
//! `checkpoint.json`, `config.snapshot`, `eval.json`, `run.json`.

mod ablate;
mod config;
mod error;
mod metrics;
mod run;

pub use ablate::{run_ablation, AblationArm, ABLATION_FILE, ABLATION_SUMMARY_FILE};
pub use config::{config_hash, ExperimentConfig, NetworkSection, Variant};
pub use error::HarnessError;
pub use metrics::{run_metrics, METRICS_FILE};
pub use run::{
    build_agent, eval_instance_seeds, reduction_pct, run_baseline, run_eval, run_oracle,
    run_train, BaselineRecord, EvalReport, EvalSummary, OracleRecord, RunRecord, CHECKPOINT_FILE,
    CURVE_FILE, EVAL_FILE, RUN_FILE, SNAPSHOT_FILE,
};
