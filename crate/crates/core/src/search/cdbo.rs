//! Coordinate-descent Bayesian optimisation.
//!
//! `S` warm-start policies are drawn from `N(w0, sigma0^2 I)` to seed a
//! Matérn-1 ARD GP over weights. Every following lap runs one stochastic
//! coordinate-ascent sweep of the UCB surface starting from the incumbent,
//! evaluates the result and adds it to the GP.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::acquisition::{AcquisitionSpec, AcquisitionSurface};
use super::bo::{run_bo, BoSettings, Proposer, SearchIncumbent};
use super::coordinate::{stochastic_coordinate_ascent, AxisBounds};
use super::line::SearchBudget;
use crate::error::{Error, Result};
use crate::gp::GpModel;
use crate::trace::{Objective, RunOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct CdboConfig {
    pub warm_starts: usize,
    pub laps: usize,
    pub sigma0: f64,
    pub acquisition: AcquisitionSpec,
    pub af_budget: usize,
    pub adapt_every: usize,
    /// Line-search half-width in units of the coordinate's ARD length-scale.
    pub search_radius: f64,
    /// Global box half-width around `w0`, in units of `sigma0`.
    pub box_radius: f64,
}

impl Default for CdboConfig {
    fn default() -> Self {
        Self {
            warm_starts: 10,
            laps: 300,
            sigma0: 0.0,
            acquisition: AcquisitionSpec::ucb(1.0),
            af_budget: SearchBudget::DEFAULT_MAX,
            adapt_every: 10,
            search_radius: 3.0,
            box_radius: 10.0,
        }
    }
}

/// `0.05 * max_i |w0_i|`.
pub fn default_sigma0(w0: &[f64]) -> f64 {
    0.05 * w0.iter().fold(0.0f64, |m, w| m.max(w.abs()))
}

/// `center + sigma * z` with `z` drawn coordinate by coordinate from a
/// standard normal.
pub fn sample_around(center: &[f64], sigma: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    center
        .iter()
        .map(|c| {
            let z: f64 = StandardNormal.sample(rng);
            c + sigma * z
        })
        .collect()
}

/// Initial ARD length-scale: warm-start samples sit roughly
/// `sigma0 * sqrt(2M)` apart, so this keeps them mutually informative.
pub(crate) fn initial_length_scale(sigma0: f64, dim: usize) -> f64 {
    if sigma0 > 0.0 {
        sigma0 * (dim as f64).sqrt()
    } else {
        1.0
    }
}

pub(crate) struct BoxAround {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxAround {
    pub fn new(center: &[f64], half_width: f64) -> Self {
        Self {
            lower: center.iter().map(|c| c - half_width).collect(),
            upper: center.iter().map(|c| c + half_width).collect(),
        }
    }
}

struct CoordinateProposer {
    spec: AcquisitionSpec,
    search_radius: f64,
    bounds: BoxAround,
}

impl Proposer for CoordinateProposer {
    fn propose(
        &mut self,
        model: &GpModel,
        incumbent: &SearchIncumbent,
        budget: &mut SearchBudget,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<f64>> {
        let surface = AcquisitionSurface::new(model, self.spec, incumbent.reward);
        let axis_bounds = AxisBounds {
            lower: self.bounds.lower.clone(),
            upper: self.bounds.upper.clone(),
            radius: (0..model.dim())
                .map(|i| self.search_radius * model.kernel().length_scale(i))
                .collect(),
        };
        let sweep = stochastic_coordinate_ascent(&surface, &incumbent.point, &axis_bounds, budget, rng)?;
        Ok(sweep.point)
    }
}

/// Runs CDBO for `config.laps` objective evaluations in total.
pub fn cdbo_run(
    objective: &dyn Objective,
    w0: &[f64],
    config: &CdboConfig,
    rng: &mut dyn RngCore,
) -> Result<RunOutcome> {
    if w0.is_empty() {
        return Err(Error::invalid("initial weights are empty"));
    }
    if !(config.sigma0 >= 0.0 && config.sigma0.is_finite()) {
        return Err(Error::invalid(format!("sigma0 must be >= 0, got {}", config.sigma0)));
    }
    let settings = BoSettings {
        warm_starts: config.warm_starts,
        laps: config.laps,
        acquisition: config.acquisition,
        af_budget: config.af_budget,
        adapt_every: config.adapt_every,
        initial_length_scale: initial_length_scale(config.sigma0, w0.len()),
    };
    settings.validate()?;
    let warm: Vec<Vec<f64>> = (0..config.warm_starts)
        .map(|_| sample_around(w0, config.sigma0, rng))
        .collect();
    let mut proposer = CoordinateProposer {
        spec: config.acquisition,
        search_radius: config.search_radius,
        bounds: BoxAround::new(w0, config.box_radius * config.sigma0),
    };
    run_bo(objective, &|w| w.to_vec(), warm, &settings, &mut proposer, rng)
}
