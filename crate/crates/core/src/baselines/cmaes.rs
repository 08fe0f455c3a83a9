//! (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates,
//! written for maximisation.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::trace::{Objective, RunOutcome, Tracker};

const MIN_EIGENVALUE: f64 = 1e-12;

/// Default population size `4 + floor(3 ln n)`.
pub fn default_population(dim: usize) -> usize {
    4 + (3.0 * (dim as f64).ln()).floor() as usize
}

#[derive(Debug, Clone)]
pub struct CmaState {
    pub mean: DVector<f64>,
    pub step_size: f64,
    pub covariance: DMatrix<f64>,
    pub path_sigma: DVector<f64>,
    pub path_c: DVector<f64>,
    pub population: usize,
    /// Recombination weights of the `mu` best candidates, summing to 1.
    pub weights: Vec<f64>,
    mu_eff: f64,
    cc: f64,
    cs: f64,
    c1: f64,
    cmu: f64,
    damps: f64,
    chi_n: f64,
    basis: DMatrix<f64>,
    scales: DVector<f64>,
    inv_sqrt_c: DMatrix<f64>,
    generation: usize,
    evals: usize,
    evals_at_eigen: usize,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
}

impl CmaState {
    pub fn new(mean: &[f64], step_size: f64) -> Result<Self> {
        Self::with_population(mean, step_size, default_population(mean.len()))
    }

    pub fn with_population(mean: &[f64], step_size: f64, population: usize) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::invalid("CMA-ES needs at least one dimension"));
        }
        if !(step_size > 0.0 && step_size.is_finite()) {
            return Err(Error::invalid(format!("step size must be positive, got {step_size}")));
        }
        if population < 2 {
            return Err(Error::invalid("population size must be at least 2"));
        }
        let nf = n as f64;
        let mu = population / 2;
        let raw: Vec<f64> = (0..mu)
            .map(|i| (mu as f64 + 0.5).ln() - ((i + 1) as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let cc = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let cs = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let cmu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let damps = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

        Ok(Self {
            mean: DVector::from_column_slice(mean),
            step_size,
            covariance: DMatrix::identity(n, n),
            path_sigma: DVector::zeros(n),
            path_c: DVector::zeros(n),
            population,
            weights,
            mu_eff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
            basis: DMatrix::identity(n, n),
            scales: DVector::from_element(n, 1.0),
            inv_sqrt_c: DMatrix::identity(n, n),
            generation: 0,
            evals: 0,
            evals_at_eigen: 0,
            lower: None,
            upper: None,
        })
    }

    /// Candidates are clamped to `[lower, upper]` and the clamped points are
    /// what the update sees.
    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != self.dim() || upper.len() != self.dim() {
            return Err(Error::invalid("bounds dimension does not match the mean"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::invalid("lower bound above upper bound"));
        }
        self.lower = Some(lower);
        self.upper = Some(upper);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Samples one generation.
    pub fn ask(&self, rng: &mut dyn RngCore) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..self.population)
            .map(|_| {
                let z = DVector::from_fn(n, |_, _| {
                    let s: f64 = StandardNormal.sample(rng);
                    s
                });
                let y = &self.basis * z.component_mul(&self.scales);
                let mut x: Vec<f64> = (&self.mean + self.step_size * y).iter().copied().collect();
                if let (Some(lo), Some(hi)) = (&self.lower, &self.upper) {
                    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
                        *v = v.clamp(*l, *h);
                    }
                }
                x
            })
            .collect()
    }

    /// Updates the distribution from a full generation and its fitness values
    /// (higher is better).
    pub fn tell(&mut self, candidates: &[Vec<f64>], fitness: &[f64]) -> Result<()> {
        if candidates.len() != self.population || fitness.len() != self.population {
            return Err(Error::invalid("tell needs exactly one fitness per candidate"));
        }
        let n = self.dim();
        let mut order: Vec<usize> = (0..self.population).collect();
        // stable, so equal fitness keeps sampling order; NaN sorts last
        order.sort_by(|&a, &b| {
            let (fa, fb) = (fitness[a], fitness[b]);
            fb.partial_cmp(&fa).unwrap_or_else(|| fa.is_nan().cmp(&fb.is_nan()))
        });

        let old_mean = self.mean.clone();
        let steps: Vec<DVector<f64>> = order[..self.weights.len()]
            .iter()
            .map(|&i| (DVector::from_column_slice(&candidates[i]) - &old_mean) / self.step_size)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in self.weights.iter().zip(&steps) {
            y_w.axpy(*w, y, 1.0);
        }
        self.mean = &old_mean + self.step_size * &y_w;

        let nf = n as f64;
        self.path_sigma = (1.0 - self.cs) * &self.path_sigma
            + (self.cs * (2.0 - self.cs) * self.mu_eff).sqrt() * (&self.inv_sqrt_c * &y_w);
        self.evals += self.population;
        self.generation += 1;
        let ps_norm = self.path_sigma.norm();
        let decay = 1.0 - (1.0 - self.cs).powi(2 * self.generation as i32);
        let hsig = ps_norm / decay.sqrt() / self.chi_n < 1.4 + 2.0 / (nf + 1.0);
        let hsig_f = if hsig { 1.0 } else { 0.0 };
        self.path_c = (1.0 - self.cc) * &self.path_c
            + hsig_f * (self.cc * (2.0 - self.cc) * self.mu_eff).sqrt() * &y_w;

        let delta_h = (1.0 - hsig_f) * self.cc * (2.0 - self.cc);
        let mut cov = (1.0 - self.c1 - self.cmu + self.c1 * delta_h) * &self.covariance;
        cov.ger(self.c1, &self.path_c, &self.path_c, 1.0);
        for (w, y) in self.weights.iter().zip(&steps) {
            cov.ger(self.cmu * w, y, y, 1.0);
        }
        self.covariance = cov;

        self.step_size *= ((self.cs / self.damps) * (ps_norm / self.chi_n - 1.0)).exp();
        if !self.step_size.is_finite() || self.step_size <= 0.0 {
            self.step_size = MIN_EIGENVALUE.sqrt();
        }

        let lag = self.population as f64 / (self.c1 + self.cmu) / nf / 10.0;
        if (self.evals - self.evals_at_eigen) as f64 > lag {
            self.evals_at_eigen = self.evals;
            self.decompose();
        }
        Ok(())
    }

    fn decompose(&mut self) {
        let n = self.dim();
        // symmetrise before decomposing, then repair tiny or negative modes
        let sym = (&self.covariance + self.covariance.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            self.covariance = DMatrix::identity(n, n);
            self.basis = DMatrix::identity(n, n);
            self.scales = DVector::from_element(n, 1.0);
            self.inv_sqrt_c = DMatrix::identity(n, n);
            return;
        }
        let vals = eig.eigenvalues.map(|v| v.max(MIN_EIGENVALUE));
        let b = eig.eigenvectors;
        self.scales = vals.map(f64::sqrt);
        let inv = vals.map(|v| 1.0 / v.sqrt());
        self.inv_sqrt_c = &b * DMatrix::from_diagonal(&inv) * b.transpose();
        self.covariance = &b * DMatrix::from_diagonal(&vals) * b.transpose();
        self.basis = b;
    }
}

/// Maximises `f` with CMA-ES using at most `max_evals` evaluations and
/// returns the best point seen with its value. `start` is evaluated first.
pub(crate) fn cmaes_maximize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    mut state: CmaState,
    start: &[f64],
    max_evals: usize,
    rng: &mut dyn RngCore,
) -> (Vec<f64>, f64, usize) {
    let mut best = (start.to_vec(), f(start));
    let mut used = 1;
    while used < max_evals {
        let pop = state.ask(rng);
        let take = pop.len().min(max_evals - used);
        let mut fit = Vec::with_capacity(take);
        for x in &pop[..take] {
            let v = f(x);
            if v > best.1 {
                best = (x.clone(), v);
            }
            fit.push(v);
        }
        used += take;
        if take < pop.len() {
            break;
        }
        state.tell(&pop, &fit).expect("population sizes match");
    }
    (best.0, best.1, used)
}

/// Runs CMA-ES directly on the objective for exactly `laps` evaluations.
/// The final generation is truncated when `laps` is not a multiple of the
/// population size.
pub fn cmaes_run(
    objective: &dyn Objective,
    w0: &[f64],
    sigma_init: f64,
    laps: usize,
    rng: &mut dyn RngCore,
) -> Result<RunOutcome> {
    if laps == 0 {
        return Err(Error::invalid("evaluation budget must be positive"));
    }
    let mut state = CmaState::new(w0, sigma_init)?;
    let mut tracker = Tracker::new(objective, laps);
    let mut remaining = laps;
    // the update time of one generation is charged to the next one's first lap
    let mut carry = Duration::ZERO;
    while remaining > 0 {
        let started = Instant::now();
        let pop = state.ask(rng);
        let mut overhead = carry + started.elapsed();
        let take = pop.len().min(remaining);
        let mut fit = Vec::with_capacity(take);
        for x in pop.iter().take(take) {
            fit.push(tracker.evaluate(x.clone(), 0, overhead));
            overhead = Duration::ZERO;
        }
        remaining -= take;
        if take == pop.len() {
            let started = Instant::now();
            state.tell(&pop, &fit)?;
            carry = started.elapsed();
        }
    }
    Ok(tracker.finish())
}
