use std::time::Instant;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::search::sample_around;
use crate::trace::{Objective, RunOutcome, Tracker};

/// `laps` independent samples from `N(w0, sigma0^2 I)`.
pub fn random_search_run(
    objective: &dyn Objective,
    w0: &[f64],
    sigma0: f64,
    laps: usize,
    rng: &mut dyn RngCore,
) -> Result<RunOutcome> {
    if laps == 0 {
        return Err(Error::invalid("evaluation budget must be positive"));
    }
    if !(sigma0 >= 0.0 && sigma0.is_finite()) {
        return Err(Error::invalid(format!("sigma0 must be >= 0, got {sigma0}")));
    }
    let mut tracker = Tracker::new(objective, laps);
    for _ in 0..laps {
        let started = Instant::now();
        let w = sample_around(w0, sigma0, rng);
        tracker.evaluate(w, 0, started.elapsed());
    }
    Ok(tracker.finish())
}
