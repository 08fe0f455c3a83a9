//! Stochastic coordinate ascent: one pass over all coordinates in a freshly
//! shuffled order, maximising along each axis with the others held fixed.

use rand::seq::SliceRandom;
use rand::RngCore;

use super::line::{maximize_on_interval, SearchBudget};
use crate::error::{check_dims, Error, Result};

/// A function that can be maximised one coordinate at a time.
pub trait AxisSurface {
    fn dim(&self) -> usize;

    fn value(&self, point: &[f64]) -> f64;

    /// The restriction of the surface to the line through `point` along
    /// `axis`. Implementations may precompute whatever does not depend on
    /// the moving coordinate.
    fn axis_fn<'s>(&'s self, point: &[f64], axis: usize) -> Box<dyn FnMut(f64) -> f64 + 's> {
        let mut p = point.to_vec();
        Box::new(move |v| {
            p[axis] = v;
            self.value(&p)
        })
    }
}

/// Per-coordinate search intervals: `center ± radius[i]`, intersected with
/// the global box `[lower[i], upper[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub radius: Vec<f64>,
}

impl AxisBounds {
    /// A box with no extra radius limit.
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let radius = vec![f64::INFINITY; lower.len()];
        Self { lower, upper, radius }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Interval for `axis` around `center`, always containing `center`.
    pub fn interval(&self, axis: usize, center: f64) -> (f64, f64) {
        let lo = (center - self.radius[axis]).max(self.lower[axis]).min(center);
        let hi = (center + self.radius[axis]).min(self.upper[axis]).max(center);
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub point: Vec<f64>,
    pub value: f64,
    pub start_value: f64,
    /// Coordinates in the order they were visited.
    pub order: Vec<usize>,
    /// The budget ran out before every coordinate was visited.
    pub truncated: bool,
}

/// Uniformly random permutation of `0..m`.
pub fn random_axis_order(m: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order
}

/// One sweep of stochastic coordinate ascent from `start`.
///
/// The start value costs one evaluation; each coordinate then gets a bounded
/// line search. Every accepted move is at least as good as the previous
/// point, so the returned value is never below `start_value`.
pub fn stochastic_coordinate_ascent(
    surface: &dyn AxisSurface,
    start: &[f64],
    bounds: &AxisBounds,
    budget: &mut SearchBudget,
    rng: &mut dyn RngCore,
) -> Result<Sweep> {
    check_dims(start.len(), surface.dim(), "sweep start vs surface")?;
    check_dims(bounds.dim(), surface.dim(), "sweep bounds vs surface")?;
    if !budget.try_charge() {
        return Err(Error::invalid("acquisition budget already exhausted"));
    }
    let mut point = start.to_vec();
    let start_value = surface.value(&point);
    let mut value = start_value;
    let order = random_axis_order(point.len(), rng);
    for (visited, &axis) in order.iter().enumerate() {
        let (lo, hi) = bounds.interval(axis, point[axis]);
        let mut f = surface.axis_fn(&point, axis);
        let res = maximize_on_interval(&mut *f, point[axis], value, lo, hi, budget);
        drop(f);
        point[axis] = res.argmax;
        value = res.value;
        if res.truncated || (budget.exhausted() && visited + 1 < order.len()) {
            return Ok(Sweep {
                point,
                value,
                start_value,
                order,
                truncated: true,
            });
        }
    }
    Ok(Sweep {
        point,
        value,
        start_value,
        order,
        truncated: false,
    })
}
