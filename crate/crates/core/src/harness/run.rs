//! Seeded runs of one method at one policy size.

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Method};
use crate::baselines::{cmaes_run, plain_bo_run, random_search_run, rembo_run, RemboConfig};
use crate::error::{Error, Result};
use crate::policy::{fit_initial_weights, Demonstration, FeatureMap, Policy};
use crate::racesim::{demo_lap, simulate_lap, CarParams, Track};
use crate::search::{cdbo_run, default_sigma0, AcquisitionSpec, CdboConfig};
use crate::trace::{Incumbent, RunOutcome};

/// Per-lap row of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub lap: usize,
    pub reward: f64,
    pub incumbent_reward: f64,
    pub af_evals: usize,
    /// Proposal wall time in milliseconds.
    pub wall_ms: f64,
    /// Simulator wall time in milliseconds.
    pub sim_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub kernels: usize,
    pub seed: u64,
    pub rows: Vec<RunRow>,
    pub incumbent: Incumbent,
    /// Total proposal time in seconds.
    pub runtime_seconds: f64,
    /// Total simulator time in seconds.
    pub sim_seconds: f64,
}

impl RunRecord {
    pub fn from_outcome(method: Method, kernels: usize, seed: u64, outcome: RunOutcome) -> Self {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        let rows = outcome
            .trace
            .iter()
            .map(|r| RunRow {
                lap: r.lap,
                reward: r.reward,
                incumbent_reward: r.incumbent_reward,
                af_evals: r.af_evals,
                wall_ms: ms(r.proposal_time),
                sim_ms: ms(r.objective_time),
            })
            .collect();
        Self {
            method,
            kernels,
            seed,
            rows,
            runtime_seconds: outcome.total_proposal_time().as_secs_f64(),
            sim_seconds: outcome.total_objective_time().as_secs_f64(),
            incumbent: outcome.incumbent,
        }
    }

    pub fn incumbent_curve(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.incumbent_reward).collect()
    }

    pub fn final_reward(&self) -> f64 {
        self.incumbent.reward
    }

    /// File stem shared by the run and timing files.
    pub fn stem(&self) -> String {
        format!("{}_M{}_seed{}", self.method.label(), self.kernels, self.seed)
    }
}

/// Everything fixed before the seeded runs: track, features, the ridge fit of
/// the demonstration and the resolved warm-start spread.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub track: Track,
    pub car: CarParams,
    pub features: FeatureMap,
    pub w0: Vec<f64>,
    pub demo_reward: f64,
    pub initial_reward: f64,
    pub sigma0: f64,
}

impl Prepared {
    pub fn reward(&self, weights: &[f64]) -> f64 {
        match Policy::new(self.features.clone(), weights.to_vec()) {
            Ok(p) => simulate_lap(&self.track, &self.car, &p).reward,
            Err(_) => 0.0,
        }
    }
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let track = Track::resolve(&config.track)?;
    let (demo, demo_result) = demo_lap(&track, &config.car, config.demo_speed)?;
    let demo = if config.demo_stride > 1 {
        let k = config.demo_stride;
        Demonstration::new(
            demo.positions().iter().step_by(k).copied().collect(),
            demo.actions().iter().step_by(k).copied().collect(),
        )?
    } else {
        demo
    };
    let features = FeatureMap::regular(config.kernels, config.policy_length_scale)?;
    let w0 = fit_initial_weights(&features, &demo, config.lambda_ridge)?;
    let sigma0 = config.sigma0.unwrap_or_else(|| default_sigma0(&w0));
    let mut prepared = Prepared {
        track,
        car: config.car,
        features,
        w0,
        demo_reward: demo_result.reward,
        initial_reward: 0.0,
        sigma0,
    };
    prepared.initial_reward = prepared.reward(&prepared.w0);
    Ok(prepared)
}

/// One seeded run on an already prepared problem.
pub fn run_seed(config: &ExperimentConfig, prepared: &Prepared, seed: u64) -> Result<RunRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objective = |w: &[f64]| prepared.reward(w);
    let w0 = &prepared.w0;
    let sigma0 = prepared.sigma0;
    let cdbo = CdboConfig {
        warm_starts: config.warm_starts,
        laps: config.laps,
        sigma0,
        acquisition: AcquisitionSpec::ucb(config.beta),
        af_budget: config.af_budget,
        adapt_every: config.adapt_every,
        ..CdboConfig::default()
    };
    let rembo = |dim| RemboConfig {
        dim,
        warm_starts: config.warm_starts,
        laps: config.laps,
        sigma0,
        af_budget: config.af_budget,
        adapt_every: config.adapt_every,
        ..RemboConfig::default()
    };
    let outcome = match config.method {
        Method::Cdbo => cdbo_run(&objective, w0, &cdbo, &mut rng)?,
        Method::BoCmaes => plain_bo_run(&objective, w0, &cdbo, &mut rng)?,
        Method::Cmaes => cmaes_run(&objective, w0, sigma0.max(1e-3), config.laps, &mut rng)?,
        Method::Rembo5 => rembo_run(&objective, w0, &rembo(5), &mut rng)?,
        Method::Rembo10 => rembo_run(&objective, w0, &rembo(10), &mut rng)?,
        Method::Random => random_search_run(&objective, w0, sigma0, config.laps, &mut rng)?,
    };
    Ok(RunRecord::from_outcome(config.method, config.kernels, seed, outcome))
}

/// Runs every seed of `config` (in parallel) and returns the records in seed
/// order. Setup errors are reported before any run starts.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let prepared = prepare(config)?;
    run_prepared(config, &prepared, true)
}

/// As [`run_experiment`] with an explicit choice of parallel or sequential
/// seeds. Sequential runs give cleaner wall times.
pub fn run_prepared(config: &ExperimentConfig, prepared: &Prepared, parallel: bool) -> Result<Vec<RunRecord>> {
    if prepared.w0.len() != config.kernels {
        return Err(Error::Validation(format!(
            "prepared weights have {} entries, config asks for {} kernels",
            prepared.w0.len(),
            config.kernels
        )));
    }
    if parallel {
        config
            .seeds
            .par_iter()
            .map(|&s| run_seed(config, prepared, s))
            .collect()
    } else {
        config.seeds.iter().map(|&s| run_seed(config, prepared, s)).collect()
    }
}
