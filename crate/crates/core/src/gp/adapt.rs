//! Hyperparameter adaptation by cyclic coordinate search on the log marginal
//! likelihood.
//!
//! One sweep visits each length-scale and then the signal variance. For each
//! parameter a fixed ladder of multiplicative steps is tried in log space
//! (clamped to the bounds) and the best strictly improving value is kept,
//! then the winning step is repeated while it keeps improving. The
//! likelihood never decreases. The noise variance is left untouched.

use nalgebra::DMatrix;

use faer::{Mat, Side};

use super::{log_marginal_likelihood, GpModel, JITTER_CEILING, JITTER_START, LN_2PI};
use crate::kernel::KernelSpec;

const LOG_STEPS: [f64; 6] = [-3.0, -1.5, -0.5, 0.5, 1.5, 3.0];
/// Extra steps allowed past the best ladder rung, in the same direction.
const MAX_EXTENSIONS: usize = 6;

#[derive(Debug, Clone, Copy)]
enum Param {
    SignalVariance,
    LengthScale(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperBounds {
    pub signal_variance: (f64, f64),
    /// One interval per length-scale of the kernel.
    pub length_scales: Vec<(f64, f64)>,
}

impl HyperBounds {
    /// Length-scales within `[1e-3, 1e3]` times their current value, signal
    /// variance within `[1e-4, 1e4]`.
    pub fn around(kernel: &KernelSpec) -> Self {
        Self {
            signal_variance: (1e-4, 1e4),
            length_scales: kernel.length_scales.iter().map(|l| (l * 1e-3, l * 1e3)).collect(),
        }
    }

    /// Bounds that only admit the kernel's current values.
    pub fn fixed(kernel: &KernelSpec) -> Self {
        Self {
            signal_variance: (kernel.signal_variance, kernel.signal_variance),
            length_scales: kernel.length_scales.iter().map(|&l| (l, l)).collect(),
        }
    }
}

struct Search<'a> {
    model: &'a GpModel,
    /// Scaled squared distances under the current length-scales.
    d2: DMatrix<f64>,
    kernel: KernelSpec,
    lml: f64,
}

impl Search<'_> {
    /// Log marginal likelihood with the same jitter escalation as a fit.
    /// Only the lower triangle of `d2` is read.
    fn score(&self, signal_variance: f64, d2: &DMatrix<f64>) -> f64 {
        let n = d2.nrows();
        let family = self.kernel.family;
        let mut gram = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            let src = &d2.as_slice()[j * n..(j + 1) * n];
            let dst = gram.col_as_slice_mut(j);
            for i in j..n {
                dst[i] = signal_variance * family.correlation_sq(src[i]);
            }
        }
        let targets = &self.model.targets;
        let ceiling = JITTER_CEILING * signal_variance;
        let mut jitter = JITTER_START * signal_variance;
        loop {
            let mut k = gram.clone();
            for i in 0..n {
                k.col_as_slice_mut(i)[i] += self.model.noise_variance + jitter;
            }
            if let Ok(chol) = k.cholesky(Side::Lower) {
                let l = chol.compute_l();
                let mut y = targets.clone();
                let mut half_logdet = 0.0;
                for j in 0..n {
                    let col = l.col_as_slice(j);
                    half_logdet += col[j].ln();
                    let yj = y[j] / col[j];
                    y[j] = yj;
                    for (yi, lij) in y[j + 1..].iter_mut().zip(&col[j + 1..]) {
                        *yi -= lij * yj;
                    }
                }
                let fit: f64 = y.iter().map(|v| v * v).sum();
                let lml = -0.5 * fit - half_logdet - 0.5 * n as f64 * LN_2PI;
                return if lml.is_finite() { lml } else { f64::NEG_INFINITY };
            }
            jitter *= 10.0;
            if jitter > ceiling * (1.0 + 1e-12) {
                return f64::NEG_INFINITY;
            }
        }
    }

    /// Squared distances with length-scale slot `slot` set to `value`
    /// (lower triangle only).
    fn rescaled(&self, slot: usize, value: f64) -> DMatrix<f64> {
        let old = self.kernel.length_scales[slot];
        if self.kernel.length_scales.len() == 1 {
            let ratio = (old / value).powi(2);
            return &self.d2 * ratio;
        }
        let shift = 1.0 / (value * value) - 1.0 / (old * old);
        let coord: Vec<f64> = self.model.inputs.iter().map(|x| x[slot]).collect();
        let n = coord.len();
        let mut d2 = self.d2.clone();
        for j in 0..n {
            let cj = coord[j];
            let col = &mut d2.as_mut_slice()[j * n..(j + 1) * n];
            for i in j + 1..n {
                let diff = coord[i] - cj;
                col[i] = (col[i] + diff * diff * shift).max(0.0);
            }
        }
        d2
    }

    fn value(&self, param: Param) -> f64 {
        match param {
            Param::SignalVariance => self.kernel.signal_variance,
            Param::LengthScale(slot) => self.kernel.length_scales[slot],
        }
    }

    fn try_value(&self, param: Param, value: f64) -> (f64, Option<DMatrix<f64>>) {
        match param {
            Param::SignalVariance => (self.score(value, &self.d2), None),
            Param::LengthScale(slot) => {
                let d2 = self.rescaled(slot, value);
                (self.score(self.kernel.signal_variance, &d2), Some(d2))
            }
        }
    }

    fn accept(&mut self, param: Param, value: f64, lml: f64, d2: Option<DMatrix<f64>>) {
        match param {
            Param::SignalVariance => self.kernel.signal_variance = value,
            Param::LengthScale(slot) => self.kernel.length_scales[slot] = value,
        }
        if let Some(d2) = d2 {
            self.d2 = d2;
        }
        self.lml = lml;
    }

    /// Tries the ladder around the current value, keeps the best improving
    /// rung and then keeps stepping the same way while that still improves.
    fn coordinate(&mut self, param: Param, (lo, hi): (f64, f64)) {
        let (lo, hi) = (lo.min(hi), hi.max(lo));
        let step_to = |from: f64, step: f64| (from.ln() + step).exp().clamp(lo, hi);
        let current = self.value(param);
        let mut best: Option<(f64, f64, f64, Option<DMatrix<f64>>)> = None;
        for step in LOG_STEPS {
            let cand = step_to(current, step);
            if cand == current || !(cand > 0.0 && cand.is_finite()) {
                continue;
            }
            let (lml, d2) = self.try_value(param, cand);
            if lml > best.as_ref().map_or(self.lml, |b| b.2) {
                best = Some((step, cand, lml, d2));
            }
        }
        let Some((step, value, lml, d2)) = best else {
            return;
        };
        self.accept(param, value, lml, d2);
        for _ in 0..MAX_EXTENSIONS {
            let from = self.value(param);
            let cand = step_to(from, step);
            if cand == from {
                break;
            }
            let (lml, d2) = self.try_value(param, cand);
            if lml > self.lml {
                self.accept(param, cand, lml, d2);
            } else {
                break;
            }
        }
    }
}

/// One cyclic sweep of log-space coordinate search over the signal variance
/// and length-scales. Returns the input model unchanged when nothing improves
/// the log marginal likelihood or when there are fewer than two observations.
pub fn adapt_hyperparams(model: &GpModel, bounds: &HyperBounds) -> GpModel {
    if model.len() < 2 || bounds.length_scales.len() != model.kernel.length_scales.len() {
        return model.clone();
    }
    let n = model.len();
    let kernel = model.kernel.clone();
    let d2 = DMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            0.0
        } else {
            kernel.sq_dist_unchecked(&model.inputs[i], &model.inputs[j])
        }
    });
    let start = log_marginal_likelihood(model);
    let mut search = Search {
        model,
        d2,
        kernel,
        lml: start,
    };
    // length-scales first: sigma_f^2 and l trade off along a ridge, and the
    // initial signal variance is already the empirical second moment
    for (slot, b) in bounds.length_scales.iter().enumerate() {
        search.coordinate(Param::LengthScale(slot), *b);
    }
    search.coordinate(Param::SignalVariance, bounds.signal_variance);
    if search.lml > start {
        // the refit reproduces the same factorization the search scored
        if let Ok(adapted) = model.with_kernel(search.kernel) {
            if log_marginal_likelihood(&adapted) >= start {
                return adapted;
            }
        }
    }
    model.clone()
}
