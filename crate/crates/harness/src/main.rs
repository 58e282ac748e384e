use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};
use harness::{
    run_ablation, run_baseline, run_eval, run_metrics, run_oracle, run_train, ExperimentConfig,
    Variant, EVAL_FILE, METRICS_FILE,
};
use qcircuit::Topology;

#[derive(Parser)]
#[command(
    name = "vqr",
    about = "Train and evaluate quantum-feature Q-learners on the officer allocation benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one run and evaluate its best checkpoint.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate an existing checkpoint on the held-out seed stream.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train one run per entangler topology with shared seed streams.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seeds, one full grid arm per seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = Topology::ALL)]
        topologies: Vec<Topology>,
    },
    /// Score expressibility and entanglement for all topologies.
    Metrics {
        #[arg(long, default_value_t = 4)]
        n_qubits: usize,
        #[arg(long, default_value_t = 2)]
        n_layers: usize,
        #[arg(long, default_value_t = circuit_metrics::DEFAULT_PAIRS)]
        pairs: usize,
        #[arg(long, default_value_t = circuit_metrics::DEFAULT_MW_SAMPLES)]
        mw_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean reward of the uniform-random policy on fresh instances.
    Baseline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 200)]
        episodes: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive optimum of one seeded instance.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> anyhow::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    Ok(config)
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Train { config, out, seed } => {
            let config = load_config(&config, seed)?;
            let record = run_train(&config, &out)?;
            println!(
                "trained {} for {} episodes in {:.1}s: eval mean {:.4}, baseline {:.4}, reduction {:.2}%",
                config.variant,
                config.episodes,
                record.wall_clock_secs,
                record.eval.mean_reward,
                record.eval.baseline_mean_reward,
                record.eval.reduction_pct
            );
            println!("artifacts in {}", out.display());
        }
        Command::Eval {
            config,
            checkpoint,
            out,
            seed,
        } => {
            let config = load_config(&config, seed)?;
            let checkpoint = (config.variant != Variant::Random).then_some(checkpoint.as_path());
            let report = run_eval(&config, checkpoint, &out)?;
            println!(
                "evaluated {} episodes: mean {:.4}, baseline {:.4}, reduction {:.2}%",
                report.episodes, report.mean_reward, report.baseline_mean_reward, report.reduction_pct
            );
            println!("report in {}", out.join(EVAL_FILE).display());
        }
        Command::Ablate {
            config,
            out,
            seeds,
            topologies,
        } => {
            let config = load_config(&config, None)?;
            let seeds = if seeds.is_empty() {
                vec![config.master_seed]
            } else {
                seeds
            };
            let arms = run_ablation(&config, &topologies, &seeds, &out)?;
            for arm in &arms {
                println!(
                    "{:>10} seed {}: mean {:.4}, reduction {:.2}%",
                    arm.topology.to_string(),
                    arm.seed,
                    arm.mean_reward,
                    arm.reduction_pct
                );
            }
            println!("tables in {}", out.display());
        }
        Command::Metrics {
            n_qubits,
            n_layers,
            pairs,
            mw_samples,
            seed,
            out,
        } => {
            let rows = run_metrics(n_qubits, n_layers, pairs, mw_samples, seed, &out)?;
            for row in &rows {
                println!(
                    "{:>10}: kl {:.4}, mean_mw {:.4}",
                    row.topology.to_string(),
                    row.kl,
                    row.mean_mw
                );
            }
            println!("table in {}", out.join(METRICS_FILE).display());
        }
        Command::Baseline {
            config,
            episodes,
            seed,
            out,
        } => {
            let config = load_config(&config, seed)?;
            let record = run_baseline(&config.hrap, episodes, config.master_seed, &out)?;
            println!(
                "random baseline over {} episodes: mean {:.4}",
                record.episodes, record.mean_reward
            );
        }
        Command::Oracle { config, seed, out } => {
            let config = load_config(&config, Some(seed))?;
            let record = run_oracle(&config.hrap, seed, out.as_deref())?;
            println!(
                "instance seed {}: optimal makespan {} (reward {:.4}), assignment {:?}",
                record.seed, record.best_makespan, record.optimal_reward, record.assignment
            );
        }
    }
    Ok(())
}
