//! Experiment orchestration: configuration, seeded runs, aggregation and
//! output files.

pub mod aggregate;
pub mod config;
pub mod output;
pub mod run;

pub use aggregate::{aggregate, aggregate_all, envelope, Curve, CurvePoint};
pub use config::{parse_pairs, ExperimentConfig, ExperimentPlan, Method};
pub use output::{emit_outputs, read_records, runtime_table, write_summaries, ExperimentEntry, Manifest, RunSummary};
pub use run::{prepare, run_experiment, run_prepared, run_seed, Prepared, RunRecord, RunRow};

use std::path::{Path, PathBuf};

use crate::error::Result;

/// Runs every experiment of `plan` and writes all outputs to `dest`.
/// All setups (tracks, demonstrations, fits) are checked before any run.
pub fn run_plan(plan: &ExperimentPlan, dest: &Path) -> Result<(Vec<RunRecord>, Vec<PathBuf>)> {
    let configs = plan.expand()?;
    let prepared = configs.iter().map(prepare).collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut manifest = Manifest::default();
    for (cfg, prep) in configs.iter().zip(&prepared) {
        records.extend(run_prepared(cfg, prep, true)?);
        manifest.experiments.push(ExperimentEntry::new(cfg, prep));
    }
    manifest.runs = records
        .iter()
        .map(|r| RunSummary {
            method: r.method.label().to_string(),
            kernels: r.kernels,
            seed: r.seed,
            final_reward: r.final_reward(),
        })
        .collect();
    let curves = aggregate_all(&records)?;
    let written = emit_outputs(&curves, &records, &manifest, dest)?;
    Ok((records, written))
}
