//! Bounded derivative-free 1-D maximisation: a uniform scan followed by
//! golden-section refinement around the best scan point.

use crate::error::{Error, Result};

const SCAN_POINTS: usize = 16;
const GOLDEN: f64 = 0.618_033_988_749_894_8;
/// Refinement stops once the bracket is this fraction of the interval.
const REL_TOL: f64 = 1e-4;
const MAX_REFINE: usize = 40;

/// Acquisition-evaluation allowance for one proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_af_evals: usize,
    pub evals_used: usize,
}

impl SearchBudget {
    pub const DEFAULT_MAX: usize = 50_000;

    pub fn new(max_af_evals: usize) -> Self {
        Self {
            max_af_evals,
            evals_used: 0,
        }
    }

    pub fn remaining(&self) -> usize {
        self.max_af_evals - self.evals_used
    }

    pub fn exhausted(&self) -> bool {
        self.evals_used >= self.max_af_evals
    }

    /// Reserves one evaluation; false when none is left.
    #[inline]
    pub fn try_charge(&mut self) -> bool {
        if self.exhausted() {
            false
        } else {
            self.evals_used += 1;
            true
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineResult {
    pub argmax: f64,
    pub value: f64,
    /// The budget ran out before the search finished.
    pub truncated: bool,
}

struct Best<'f> {
    f: &'f mut dyn FnMut(f64) -> f64,
    arg: f64,
    value: f64,
}

impl Best<'_> {
    /// Evaluates `t` if the budget allows. Only strict improvements move the
    /// incumbent, so ties keep the starting point.
    fn probe(&mut self, t: f64, budget: &mut SearchBudget) -> Option<f64> {
        if !budget.try_charge() {
            return None;
        }
        let v = (self.f)(t);
        if v > self.value {
            self.arg = t;
            self.value = v;
        }
        Some(v)
    }
}

/// Maximises `f` on `[center - halfwidth, center + halfwidth]`. The result is
/// never worse than `f(center)`, which is evaluated first.
pub fn line_maximize<F>(mut f: F, center: f64, halfwidth: f64, budget: &mut SearchBudget) -> Result<LineResult>
where
    F: FnMut(f64) -> f64,
{
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return Err(Error::invalid(format!("halfwidth must be positive, got {halfwidth}")));
    }
    if !budget.try_charge() {
        return Err(Error::invalid("acquisition budget already exhausted"));
    }
    let start_value = f(center);
    Ok(maximize_on_interval(
        &mut f,
        center,
        start_value,
        center - halfwidth,
        center + halfwidth,
        budget,
    ))
}

/// Maximises `f` on `[lo, hi]` starting from `start` whose value is already
/// known. Returns the start unchanged when the interval is degenerate.
pub fn maximize_on_interval(
    f: &mut dyn FnMut(f64) -> f64,
    start: f64,
    start_value: f64,
    lo: f64,
    hi: f64,
    budget: &mut SearchBudget,
) -> LineResult {
    let mut best = Best {
        f,
        arg: start,
        value: start_value,
    };
    let width = hi - lo;
    if !(width > 0.0) {
        return LineResult {
            argmax: start,
            value: start_value,
            truncated: false,
        };
    }
    let truncated = |best: &Best| LineResult {
        argmax: best.arg,
        value: best.value,
        truncated: true,
    };

    let step = width / (SCAN_POINTS - 1) as f64;
    for k in 0..SCAN_POINTS {
        let t = if k == SCAN_POINTS - 1 { hi } else { lo + k as f64 * step };
        if best.probe(t, budget).is_none() {
            return truncated(&best);
        }
    }

    let mut a = (best.arg - step).max(lo);
    let mut b = (best.arg + step).min(hi);
    let tol = REL_TOL * width;
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let Some(mut fc) = best.probe(c, budget) else {
        return truncated(&best);
    };
    let Some(mut fd) = best.probe(d, budget) else {
        return truncated(&best);
    };
    for _ in 0..MAX_REFINE {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            match best.probe(c, budget) {
                Some(v) => fc = v,
                None => return truncated(&best),
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            match best.probe(d, budget) {
                Some(v) => fd = v,
                None => return truncated(&best),
            }
        }
    }
    LineResult {
        argmax: best.arg,
        value: best.value,
        truncated: false,
    }
}
