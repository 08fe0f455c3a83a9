use std::cell::RefCell;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::coordinate::AxisSurface;
use crate::error::{Error, Result};
use crate::gp::GpModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AcquisitionKind {
    /// Upper confidence bound `mu + beta * sigma`.
    Ucb,
    /// Expected improvement over the incumbent reward.
    Ei,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionSpec {
    pub kind: AcquisitionKind,
    pub beta: f64,
    pub xi: f64,
}

impl AcquisitionSpec {
    pub fn ucb(beta: f64) -> Self {
        Self {
            kind: AcquisitionKind::Ucb,
            beta,
            xi: 0.0,
        }
    }

    pub fn ei(xi: f64) -> Self {
        Self {
            kind: AcquisitionKind::Ei,
            beta: 0.0,
            xi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return Err(Error::invalid(format!("xi must be >= 0, got {}", self.xi)));
        }
        Ok(())
    }

    /// Acquisition value from a posterior mean and variance.
    #[inline]
    pub fn score(&self, mean: f64, variance: f64, best: f64) -> f64 {
        let sd = variance.max(0.0).sqrt();
        match self.kind {
            AcquisitionKind::Ucb => mean + self.beta * sd,
            AcquisitionKind::Ei => expected_improvement(mean, sd, best + self.xi),
        }
    }
}

fn expected_improvement(mean: f64, sd: f64, threshold: f64) -> f64 {
    let gain = mean - threshold;
    if sd <= 1e-300 {
        return gain.max(0.0);
    }
    let u = gain / sd;
    let n = Normal::standard();
    (gain * n.cdf(u) + sd * n.pdf(u)).max(0.0)
}

/// Acquisition value of `w` under the model. `best` is only used by EI.
pub fn acquisition(model: &GpModel, spec: &AcquisitionSpec, w: &[f64], best: f64) -> Result<f64> {
    let (mean, var) = model.predict(w)?;
    Ok(spec.score(mean, var, best))
}

/// The acquisition surface of a fitted model, as seen by the optimisers.
pub struct AcquisitionSurface<'a> {
    pub model: &'a GpModel,
    pub spec: AcquisitionSpec,
    pub best: f64,
    /// Last slice point and its scaled distances to the training inputs.
    cache: RefCell<Option<(Vec<f64>, Vec<f64>)>>,
}

impl<'a> AcquisitionSurface<'a> {
    pub fn new(model: &'a GpModel, spec: AcquisitionSpec, best: f64) -> Self {
        Self {
            model,
            spec,
            best,
            cache: RefCell::new(None),
        }
    }
}

impl AxisSurface for AcquisitionSurface<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn value(&self, point: &[f64]) -> f64 {
        let mut k = Vec::with_capacity(self.model.len());
        self.model.cross_cov(point, &mut k);
        let (mean, var) = self.model.predict_from_cross(&mut k);
        self.spec.score(mean, var, self.best)
    }

    fn axis_fn<'s>(&'s self, point: &[f64], axis: usize) -> Box<dyn FnMut(f64) -> f64 + 's> {
        // a sweep moves one coordinate between slices, so the distances can
        // be shifted in O(N) instead of recomputed in O(N M)
        let mut cache = self.cache.borrow_mut();
        let dists = match cache.as_mut() {
            Some((at, dists)) if at.len() == point.len() => {
                self.model.shift_sq_dists(dists, at, point);
                at.copy_from_slice(point);
                dists
            }
            _ => {
                let dists = self.model.scaled_sq_dists(point).expect("point dimension checked by the sweep");
                &mut cache.insert((point.to_vec(), dists)).1
            }
        };
        let mut slice = self
            .model
            .axis_slice_from(dists, point, axis)
            .expect("point dimension checked by the sweep");
        let spec = self.spec;
        let best = self.best;
        Box::new(move |v| {
            let (mean, var) = slice.predict(v);
            spec.score(mean, var, best)
        })
    }
}
