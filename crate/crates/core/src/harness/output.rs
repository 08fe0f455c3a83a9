//! Output files: per-run traces, curves, runtime table and manifest.
//!
//! ```text
//! dest/
//!   runs/<method>_M<k>_seed<s>.csv     lap,reward,incumbent_reward,af_evals
//!   weights/<method>_M<k>_seed<s>.csv  index,weight (final incumbent)
//!   timing/<method>_M<k>_seed<s>.csv   lap,wall_ms,sim_ms
//!   curves/<method>_M<k>.csv           lap,mean,min,max
//!   runtime.csv                        method,kernels,mean_seconds,mean_sim_seconds,runs
//!   manifest.json
//! ```
//!
//! Everything except `timing/` and `runtime.csv` is a pure function of the
//! manifest, so reruns reproduce those files byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::aggregate::Curve;
use super::config::{ExperimentConfig, Method};
use super::run::{Prepared, RunRecord, RunRow};
use crate::error::{Error, Result};
use crate::trace::Incumbent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentEntry {
    pub config: BTreeMap<String, String>,
    /// Warm-start spread actually used.
    pub sigma0: f64,
    pub demo_reward: f64,
    pub initial_reward: f64,
    pub initial_weights: Vec<f64>,
}

impl ExperimentEntry {
    pub fn new(config: &ExperimentConfig, prepared: &Prepared) -> Self {
        Self {
            config: config.to_pairs().into_iter().collect(),
            sigma0: prepared.sigma0,
            demo_reward: prepared.demo_reward,
            initial_reward: prepared.initial_reward,
            initial_weights: prepared.w0.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub kernels: usize,
    pub seed: u64,
    pub final_reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiments: Vec<ExperimentEntry>,
    pub runs: Vec<RunSummary>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
    }
}

/// `(method, kernels, mean proposal seconds, mean simulator seconds, runs)`
/// per group, in order of first appearance.
pub fn runtime_table(records: &[RunRecord]) -> Vec<(Method, usize, f64, f64, usize)> {
    let mut out: Vec<(Method, usize, f64, f64, usize)> = Vec::new();
    for r in records {
        match out.iter_mut().find(|e| e.0 == r.method && e.1 == r.kernels) {
            Some(e) => {
                e.2 += r.runtime_seconds;
                e.3 += r.sim_seconds;
                e.4 += 1;
            }
            None => out.push((r.method, r.kernels, r.runtime_seconds, r.sim_seconds, 1)),
        }
    }
    for e in &mut out {
        e.2 /= e.4 as f64;
        e.3 /= e.4 as f64;
    }
    out
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn write_curve(path: &Path, curve: &Curve) -> Result<()> {
    write_csv(
        path,
        &["lap", "mean", "min", "max"],
        curve.points.iter().map(|p| {
            vec![p.lap.to_string(), p.mean.to_string(), p.min.to_string(), p.max.to_string()]
        }),
    )
}

pub fn write_runtime(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_csv(
        path,
        &["method", "kernels", "mean_seconds", "mean_sim_seconds", "runs"],
        runtime_table(records).into_iter().map(|(m, k, s, sim, n)| {
            vec![m.label().to_string(), k.to_string(), s.to_string(), sim.to_string(), n.to_string()]
        }),
    )
}

/// Writes curves and the runtime table only.
pub fn write_summaries(curves: &[Curve], records: &[RunRecord], dest: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Validation("no run records to write".into()));
    }
    let mut written = Vec::new();
    let curves_dir = dest.join("curves");
    create_dir(&curves_dir)?;
    for c in curves {
        let path = curves_dir.join(format!("{}.csv", c.name()));
        write_curve(&path, c)?;
        written.push(path);
    }
    let path = dest.join("runtime.csv");
    write_runtime(&path, records)?;
    written.push(path);
    Ok(written)
}

/// Writes every output file under `dest` and returns the paths written. An
/// empty record list is rejected before anything touches the disk.
pub fn emit_outputs(
    curves: &[Curve],
    records: &[RunRecord],
    manifest: &Manifest,
    dest: &Path,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Validation("no run records to write".into()));
    }
    let runs = dest.join("runs");
    let weights = dest.join("weights");
    let timing = dest.join("timing");
    for d in [&runs, &weights, &timing] {
        create_dir(d)?;
    }
    let mut written = Vec::new();
    for r in records {
        let name = format!("{}.csv", r.stem());
        let path = runs.join(&name);
        write_csv(
            &path,
            &["lap", "reward", "incumbent_reward", "af_evals"],
            r.rows.iter().map(|row| {
                vec![
                    row.lap.to_string(),
                    row.reward.to_string(),
                    row.incumbent_reward.to_string(),
                    row.af_evals.to_string(),
                ]
            }),
        )?;
        written.push(path);

        let path = weights.join(&name);
        write_csv(
            &path,
            &["index", "weight"],
            r.incumbent.weights.iter().enumerate().map(|(i, w)| vec![i.to_string(), w.to_string()]),
        )?;
        written.push(path);

        let path = timing.join(&name);
        write_csv(
            &path,
            &["lap", "wall_ms", "sim_ms"],
            r.rows
                .iter()
                .map(|row| vec![row.lap.to_string(), row.wall_ms.to_string(), row.sim_ms.to_string()]),
        )?;
        written.push(path);
    }
    written.extend(write_summaries(curves, records, dest)?);
    let path = dest.join("manifest.json");
    let mut json = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Validation(format!("manifest: {e}")))?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

fn parse_stem(stem: &str) -> Option<(Method, usize, u64)> {
    let (rest, seed) = stem.rsplit_once("_seed")?;
    let (label, kernels) = rest.rsplit_once("_M")?;
    Some((label.parse().ok()?, kernels.parse().ok()?, seed.parse().ok()?))
}

fn read_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.records()
        .map(|rec| {
            rec.map(|x| x.iter().map(str::to_string).collect())
                .map_err(|e| csv_error(path, e))
        })
        .collect()
}

fn field<T: std::str::FromStr>(path: &Path, row: &[String], i: usize) -> Result<T> {
    row.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Validation(format!("{}: bad or missing column {}", path.display(), i + 1)))
}

/// Reads the records written by [`emit_outputs`] from `dir`. Timing files
/// are optional; without them wall times read as zero.
pub fn read_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let runs = dir.join("runs");
    let entries = fs::read_dir(&runs).map_err(|e| Error::io(&runs, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for path in files {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let Some((method, kernels, seed)) = parse_stem(&stem) else {
            continue;
        };
        let mut rows = Vec::new();
        for row in read_rows(&path)? {
            rows.push(RunRow {
                lap: field(&path, &row, 0)?,
                reward: field(&path, &row, 1)?,
                incumbent_reward: field(&path, &row, 2)?,
                af_evals: field(&path, &row, 3)?,
                wall_ms: 0.0,
                sim_ms: 0.0,
            });
        }
        let timing = dir.join("timing").join(format!("{stem}.csv"));
        if timing.exists() {
            let t = read_rows(&timing)?;
            if t.len() != rows.len() {
                return Err(Error::Validation(format!(
                    "{}: {} rows, run file has {}",
                    timing.display(),
                    t.len(),
                    rows.len()
                )));
            }
            for (row, t) in rows.iter_mut().zip(&t) {
                row.wall_ms = field(&timing, t, 1)?;
                row.sim_ms = field(&timing, t, 2)?;
            }
        }
        let wpath = dir.join("weights").join(format!("{stem}.csv"));
        let weights = if wpath.exists() {
            read_rows(&wpath)?
                .iter()
                .map(|r| field(&wpath, r, 1))
                .collect::<Result<Vec<f64>>>()?
        } else {
            Vec::new()
        };
        let reward = rows.last().map_or(f64::NAN, |r| r.incumbent_reward);
        out.push(RunRecord {
            method,
            kernels,
            seed,
            runtime_seconds: rows.iter().map(|r| r.wall_ms).sum::<f64>() / 1e3,
            sim_seconds: rows.iter().map(|r| r.sim_ms).sum::<f64>() / 1e3,
            rows,
            incumbent: Incumbent { weights, reward },
        });
    }
    if out.is_empty() {
        return Err(Error::Validation(format!("no run files found in {}", runs.display())));
    }
    out.sort_by_key(|r| (r.method, r.kernels, r.seed));
    Ok(out)
}
