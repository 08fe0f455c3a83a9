//! Kernel-feature control policies over normalised track position.
//!
//! A policy is `clamp(w^T phi(x), -1, 1)` where `phi(x)` collects Matérn-3
//! evaluations against `M` inducing points on `[0, 1]`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dims, Error, Result};
use crate::kernel::{KernelFamily, KernelSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    kernel: KernelSpec,
    inducing_points: Vec<f64>,
}

impl FeatureMap {
    /// Custom inducing points (sorted, within `[0, 1]`) with a shared
    /// Matérn-3 length-scale.
    pub fn new(inducing_points: Vec<f64>, length_scale: f64) -> Result<Self> {
        if inducing_points.is_empty() {
            return Err(Error::invalid("feature map needs at least one inducing point"));
        }
        if inducing_points.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::invalid("inducing points must lie in [0, 1]"));
        }
        if inducing_points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("inducing points must be sorted ascending"));
        }
        let kernel = KernelSpec::isotropic(KernelFamily::Matern3, 1.0, length_scale)?;
        Ok(Self {
            kernel,
            inducing_points,
        })
    }

    /// `M` evenly spaced points `i / (M - 1)`. The length-scale defaults to
    /// the grid spacing.
    pub fn regular(m: usize, length_scale: Option<f64>) -> Result<Self> {
        match m {
            0 => Err(Error::invalid("feature map needs at least one kernel")),
            1 => Self::new(vec![0.5], length_scale.unwrap_or(1.0)),
            _ => {
                let spacing = 1.0 / (m - 1) as f64;
                let points = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
                Self::new(points, length_scale.unwrap_or(spacing))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.inducing_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inducing_points.is_empty()
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn length_scale(&self) -> f64 {
        self.kernel.length_scales[0]
    }

    pub fn inducing_points(&self) -> &[f64] {
        &self.inducing_points
    }

    #[inline]
    fn component(&self, x: f64, xi: f64) -> f64 {
        self.kernel.family.correlation((x - xi).abs() / self.length_scale())
    }

    pub(crate) fn fill(&self, x: f64, out: &mut [f64]) {
        for (o, xi) in out.iter_mut().zip(&self.inducing_points) {
            *o = self.component(x, *xi);
        }
    }

    pub fn feature_vector(&self, x: f64) -> Result<Vec<f64>> {
        check_position(x)?;
        let mut out = vec![0.0; self.len()];
        self.fill(x, &mut out);
        Ok(out)
    }
}

fn check_position(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("track position {x} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    features: FeatureMap,
    weights: Vec<f64>,
}

impl Policy {
    pub fn new(features: FeatureMap, weights: Vec<f64>) -> Result<Self> {
        check_dims(weights.len(), features.len(), "policy weights vs kernels")?;
        Ok(Self { features, weights })
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Unclamped `w^T phi(x)`.
    #[inline]
    pub fn raw_output(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.features.inducing_points)
            .map(|(w, xi)| w * self.features.component(x, *xi))
            .sum()
    }

    /// Action in `[-1, 1]` without range checking `x`.
    #[inline]
    pub(crate) fn action_unchecked(&self, x: f64) -> f64 {
        self.raw_output(x).clamp(-1.0, 1.0)
    }

    pub fn action(&self, x: f64) -> Result<f64> {
        check_position(x)?;
        Ok(self.action_unchecked(x))
    }
}

/// Recorded `(position, action)` pairs from a driving example.
#[derive(Debug, Clone, PartialEq)]
pub struct Demonstration {
    positions: Vec<f64>,
    actions: Vec<f64>,
}

impl Demonstration {
    pub fn new(positions: Vec<f64>, actions: Vec<f64>) -> Result<Self> {
        check_dims(positions.len(), actions.len(), "demonstration positions vs actions")?;
        if let Some(x) = positions.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::invalid(format!("demonstration position {x} outside [0, 1]")));
        }
        if let Some(a) = actions.iter().find(|a| !(-1.0..=1.0).contains(*a)) {
            return Err(Error::invalid(format!("demonstration action {a} outside [-1, 1]")));
        }
        if positions.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("demonstration positions must be nondecreasing"));
        }
        Ok(Self { positions, actions })
    }

    /// Accepts positions that run past the finish line by wrapping them
    /// modulo 1 and re-sorting.
    pub fn from_recording(positions: Vec<f64>, actions: Vec<f64>) -> Result<Self> {
        check_dims(positions.len(), actions.len(), "demonstration positions vs actions")?;
        let mut pairs: Vec<(f64, f64)> = positions
            .into_iter()
            .map(|x| if x > 1.0 { x.rem_euclid(1.0) } else { x })
            .zip(actions)
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (positions, actions) = pairs.into_iter().unzip();
        Self::new(positions, actions)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Two whitespace-separated columns `x a`, one sample per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        let mut actions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let mut cols = line.split_whitespace();
            let (Some(x), Some(a), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(parse_err(format!("expected two columns, got {line:?}")));
            };
            positions.push(x.parse::<f64>().map_err(|e| parse_err(format!("position {x:?}: {e}")))?);
            actions.push(a.parse::<f64>().map_err(|e| parse_err(format!("action {a:?}: {e}")))?);
        }
        Self::new(positions, actions)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 40);
        for (x, a) in self.positions.iter().zip(&self.actions) {
            let _ = writeln!(out, "{x} {a}");
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Ridge fit `w0 = (Phi^T Phi + lambda I)^-1 Phi^T a` of the demonstration.
pub fn fit_initial_weights(features: &FeatureMap, demo: &Demonstration, ridge: f64) -> Result<Vec<f64>> {
    if demo.is_empty() {
        return Err(Error::invalid("demonstration is empty"));
    }
    if !(ridge > 0.0 && ridge.is_finite()) {
        return Err(Error::invalid(format!("ridge factor must be positive, got {ridge}")));
    }
    let m = features.len();
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    let mut phi = vec![0.0; m];
    for (x, a) in demo.positions.iter().zip(&demo.actions) {
        features.fill(*x, &mut phi);
        for j in 0..m {
            let pj = phi[j];
            if pj == 0.0 {
                continue;
            }
            rhs[j] += pj * a;
            let col = gram.column_mut(j);
            for (g, pi) in col.into_iter().zip(&phi).skip(j) {
                *g += pi * pj;
            }
        }
    }
    for j in 0..m {
        gram[(j, j)] += ridge;
        for i in 0..j {
            gram[(i, j)] = gram[(j, i)];
        }
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::invalid("ridge system is not positive definite"))?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}
