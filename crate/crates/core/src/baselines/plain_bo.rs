//! Standard BO: the same GP loop as CDBO, but each proposal maximises the
//! acquisition globally over the box with CMA-ES.

use rand::RngCore;

use super::cmaes::{cmaes_maximize, CmaState};
use crate::error::{Error, Result};
use crate::gp::GpModel;
use crate::search::bo::{run_bo, BoSettings, Proposer, SearchIncumbent};
use crate::search::cdbo::{initial_length_scale, sample_around, BoxAround};
use crate::search::{AcquisitionSpec, AcquisitionSurface, AxisSurface, CdboConfig, SearchBudget};
use crate::trace::{Objective, RunOutcome};

/// Maximises `surface` over `[lower, upper]` with CMA-ES started at `start`,
/// charging every evaluation to `budget`. Never returns a point worse than
/// `start`.
pub fn cmaes_propose(
    surface: &dyn AxisSurface,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    step_size: f64,
    budget: &mut SearchBudget,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if budget.exhausted() {
        return Err(Error::invalid("acquisition budget already exhausted"));
    }
    let state = CmaState::new(start, step_size)?.with_bounds(lower.to_vec(), upper.to_vec())?;
    let mut f = |x: &[f64]| surface.value(x);
    let (best, _, used) = cmaes_maximize(&mut f, state, start, budget.remaining(), rng);
    budget.evals_used += used;
    Ok(best)
}

struct CmaesProposer {
    spec: AcquisitionSpec,
    bounds: BoxAround,
    step_size: f64,
}

impl Proposer for CmaesProposer {
    fn propose(
        &mut self,
        model: &GpModel,
        incumbent: &SearchIncumbent,
        budget: &mut SearchBudget,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<f64>> {
        let surface = AcquisitionSurface::new(model, self.spec, incumbent.reward);
        cmaes_propose(
            &surface,
            &incumbent.point,
            &self.bounds.lower,
            &self.bounds.upper,
            self.step_size,
            budget,
            rng,
        )
    }
}

/// BO with the CDBO warm starts, GP and acquisition, proposing with CMA-ES
/// over `w0 ± box_radius * sigma0` (initial step `2 * sigma0`).
/// `search_radius` is not used.
pub fn plain_bo_run(
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
    let step_size = if config.sigma0 > 0.0 { 2.0 * config.sigma0 } else { 1e-3 };
    let mut proposer = CmaesProposer {
        spec: config.acquisition,
        bounds: BoxAround::new(w0, config.box_radius * config.sigma0),
        step_size,
    };
    run_bo(objective, &|w| w.to_vec(), warm, &settings, &mut proposer, rng)
}
