use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cdbo::harness::{aggregate_all, read_records, run_plan, runtime_table, write_summaries, ExperimentPlan};
use cdbo::racesim::{demo_lap, CarParams, Track};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cdbo", version, about = "Coordinate-descent BO policy search on a lap simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments and write runs, curves, runtime table and manifest
    Run(Box<RunArgs>),
    /// Recompute curves and the runtime table from a results directory
    Aggregate {
        /// Directory containing `runs/` (and optionally `timing/`)
        dir: PathBuf,
        /// Where to write curves and runtime.csv (defaults to DIR)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drive a speed-hold lap and write the demonstration file
    Demo {
        #[arg(long, default_value = "forza-analog")]
        track: String,
        /// Target speed in m/s
        #[arg(long, default_value_t = 15.0)]
        speed: f64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines
    config: Option<PathBuf>,
    #[arg(long, short, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    track: Option<String>,
    /// One method or a comma-separated list
    #[arg(long)]
    method: Option<String>,
    /// One kernel count or a comma-separated list
    #[arg(long)]
    kernels: Option<String>,
    #[arg(long)]
    laps: Option<String>,
    #[arg(long)]
    warm_starts: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    /// Comma-separated seeds
    #[arg(long, alias = "seeds")]
    seed: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Number or `auto`
    #[arg(long)]
    sigma0: Option<String>,
    #[arg(long)]
    lambda_ridge: Option<String>,
    #[arg(long)]
    af_budget: Option<String>,
    /// Any other key, e.g. `--set car.mu_g=11`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn plan(&self) -> Result<ExperimentPlan> {
        let mut plan = match &self.config {
            Some(path) => ExperimentPlan::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentPlan::default(),
        };
        let flags = [
            ("track", &self.track),
            ("method", &self.method),
            ("kernels", &self.kernels),
            ("laps", &self.laps),
            ("warm_starts", &self.warm_starts),
            ("repeats", &self.repeats),
            ("seeds", &self.seed),
            ("beta", &self.beta),
            ("sigma0", &self.sigma0),
            ("lambda_ridge", &self.lambda_ridge),
            ("af_budget", &self.af_budget),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                plan.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        for kv in &self.set {
            let Some((k, v)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{kv}`");
            };
            plan.set(k, v).with_context(|| format!("--set {kv}"))?;
        }
        Ok(plan)
    }
}

fn print_runtime(records: &[cdbo::harness::RunRecord]) {
    println!("{:<10} {:>6} {:>14} {:>14}", "method", "M", "proposal [s]", "sim [s]");
    for (m, k, s, sim, _) in runtime_table(records) {
        println!("{:<10} {k:>6} {s:>14.3} {sim:>14.3}", m.label());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let plan = args.plan()?;
            let (records, written) = run_plan(&plan, &args.out)?;
            for curve in aggregate_all(&records)? {
                println!("{:<20} final mean best reward {}", curve.name(), curve.final_mean());
            }
            print_runtime(&records);
            println!("wrote {} files under {}", written.len(), args.out.display());
        }
        Command::Aggregate { dir, out } => {
            let records = read_records(&dir)?;
            let curves = aggregate_all(&records)?;
            let out = out.unwrap_or(dir);
            let written = write_summaries(&curves, &records, &out)?;
            for curve in &curves {
                println!("{:<20} final mean best reward {}", curve.name(), curve.final_mean());
            }
            print_runtime(&records);
            println!("wrote {} files under {}", written.len(), out.display());
        }
        Command::Demo { track, speed, out } => {
            let track = Track::resolve(&track)?;
            let (demo, result) = demo_lap(&track, &CarParams::default(), speed)?;
            demo.save(&out)?;
            println!(
                "{} samples, lap time {} s, reward {} m/s -> {}",
                demo.len(),
                result.lap_time,
                result.reward,
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
