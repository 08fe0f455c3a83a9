//! The sequential BO loop shared by CDBO, BO with a CMA-ES acquisition
//! optimiser and REMBO. The variants differ only in how a proposal is chosen
//! and in the space the GP lives in.

use std::time::{Duration, Instant};

use rand::RngCore;

use super::acquisition::AcquisitionSpec;
use super::line::SearchBudget;
use crate::error::{Error, Result};
use crate::gp::{adapt_hyperparams, gp_fit, gp_update, GpModel, HyperBounds};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::trace::{Objective, RunOutcome, Tracker};

#[derive(Debug, Clone, PartialEq)]
pub struct BoSettings {
    pub warm_starts: usize,
    pub laps: usize,
    pub acquisition: AcquisitionSpec,
    pub af_budget: usize,
    /// Re-run hyperparameter adaptation after this many new observations
    /// (0 disables it after the initial fit).
    pub adapt_every: usize,
    /// Initial ARD length-scale for every search coordinate.
    pub initial_length_scale: f64,
}

impl BoSettings {
    pub fn validate(&self) -> Result<()> {
        if self.warm_starts == 0 {
            return Err(Error::invalid("at least one warm-start sample is required"));
        }
        if self.laps < self.warm_starts {
            return Err(Error::invalid(format!(
                "lap budget {} is smaller than the {} warm starts",
                self.laps, self.warm_starts
            )));
        }
        if self.af_budget == 0 {
            return Err(Error::invalid("acquisition budget must be positive"));
        }
        if !(self.initial_length_scale > 0.0 && self.initial_length_scale.is_finite()) {
            return Err(Error::invalid("initial length-scale must be positive"));
        }
        self.acquisition.validate()
    }
}

/// Best search-space point observed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchIncumbent {
    pub point: Vec<f64>,
    pub reward: f64,
}

/// Chooses the next search-space point to evaluate.
pub(crate) trait Proposer {
    fn propose(
        &mut self,
        model: &GpModel,
        incumbent: &SearchIncumbent,
        budget: &mut SearchBudget,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<f64>>;
}

fn initial_kernel(dim: usize, targets: &[f64], length_scale: f64) -> Result<(KernelSpec, HyperBounds)> {
    // zero prior mean, so the signal variance starts at the second moment
    let second_moment = targets.iter().map(|z| z * z).sum::<f64>() / targets.len() as f64;
    let bounds_sf2 = (1e-4, 1e4);
    let signal_variance = if second_moment > 0.0 {
        second_moment.clamp(bounds_sf2.0, bounds_sf2.1)
    } else {
        1.0
    };
    let kernel = KernelSpec::new(KernelFamily::Matern1, signal_variance, vec![length_scale; dim])?;
    let mut bounds = HyperBounds::around(&kernel);
    bounds.signal_variance = bounds_sf2;
    Ok((kernel, bounds))
}

/// Runs warm starts followed by `laps - warm_starts` BO iterations.
///
/// `decode` maps a search-space point to the weights handed to the objective
/// and stored in the trace.
pub(crate) fn run_bo(
    objective: &dyn Objective,
    decode: &dyn Fn(&[f64]) -> Vec<f64>,
    warm_points: Vec<Vec<f64>>,
    settings: &BoSettings,
    proposer: &mut dyn Proposer,
    rng: &mut dyn RngCore,
) -> Result<RunOutcome> {
    settings.validate()?;
    if warm_points.len() != settings.warm_starts {
        return Err(Error::invalid("warm-start sample count does not match settings"));
    }
    let mut tracker = Tracker::new(objective, settings.laps);
    let mut incumbent: Option<SearchIncumbent> = None;
    let observe = |tracker: &mut Tracker,
                       incumbent: &mut Option<SearchIncumbent>,
                       point: &[f64],
                       af_evals: usize,
                       elapsed: Duration| {
        let reward = tracker.evaluate(decode(point), af_evals, elapsed);
        if incumbent.as_ref().is_none_or(|inc| reward > inc.reward) {
            *incumbent = Some(SearchIncumbent {
                point: point.to_vec(),
                reward,
            });
        }
        reward
    };

    let mut targets = Vec::with_capacity(settings.laps);
    for p in &warm_points {
        targets.push(observe(&mut tracker, &mut incumbent, p, 0, Duration::ZERO));
    }
    if settings.laps == settings.warm_starts {
        return Ok(tracker.finish());
    }

    let setup = Instant::now();
    let dim = warm_points[0].len();
    let (kernel, bounds) = initial_kernel(dim, &targets, settings.initial_length_scale)?;
    let mut model = gp_fit(kernel, 0.0, warm_points, targets)?;
    model = adapt_hyperparams(&model, &bounds);
    let mut carry = setup.elapsed();

    for lap in settings.warm_starts..settings.laps {
        let started = Instant::now();
        let mut budget = SearchBudget::new(settings.af_budget);
        let current = incumbent.clone().expect("warm starts set an incumbent");
        let point = proposer.propose(&model, &current, &mut budget, rng)?;
        let elapsed = carry + started.elapsed();
        let reward = observe(&mut tracker, &mut incumbent, &point, budget.evals_used, elapsed);

        if lap + 1 == settings.laps {
            break;
        }
        let started = Instant::now();
        model = gp_update(&model, point, reward)?;
        let new_obs = model.len() - settings.warm_starts;
        if settings.adapt_every > 0 && new_obs.is_multiple_of(settings.adapt_every) {
            model = adapt_hyperparams(&model, &bounds);
        }
        carry = started.elapsed();
    }
    Ok(tracker.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_validation() {
        let ok = BoSettings {
            warm_starts: 2,
            laps: 5,
            acquisition: AcquisitionSpec::ucb(1.0),
            af_budget: 10,
            adapt_every: 10,
            initial_length_scale: 1.0,
        };
        assert!(ok.validate().is_ok());
        assert!(BoSettings { laps: 1, ..ok.clone() }.validate().is_err());
        assert!(BoSettings { warm_starts: 0, ..ok.clone() }.validate().is_err());
        assert!(BoSettings { af_budget: 0, ..ok.clone() }.validate().is_err());
        assert!(BoSettings {
            initial_length_scale: 0.0,
            ..ok
        }
        .validate()
        .is_err());
    }

    #[test]
    fn initial_signal_variance_from_second_moment() {
        let (k, b) = initial_kernel(3, &[3.0, 4.0], 0.5).unwrap();
        assert_eq!(k.signal_variance, 12.5);
        assert_eq!(k.length_scales, vec![0.5; 3]);
        assert_eq!(b.length_scales[0], (0.5e-3, 0.5e3));
        let (k, _) = initial_kernel(1, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(k.signal_variance, 1.0);
    }
}
