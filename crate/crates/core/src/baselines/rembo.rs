//! REMBO: BO with expected improvement in a random low-dimensional
//! embedding `w = w0 + A y`, `y` in `[-s, s]^d`.

use nalgebra::DMatrix;
use rand::distributions::{Distribution, Uniform};
use rand::RngCore;
use rand_distr::StandardNormal;

use super::plain_bo::cmaes_propose;
use crate::error::{check_dims, Error, Result};
use crate::gp::GpModel;
use crate::search::bo::{run_bo, BoSettings, Proposer, SearchIncumbent};
use crate::search::cdbo::BoxAround;
use crate::search::{AcquisitionSpec, AcquisitionSurface, SearchBudget};
use crate::trace::{Objective, RunOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct RemboConfig {
    pub dim: usize,
    pub warm_starts: usize,
    pub laps: usize,
    pub sigma0: f64,
    pub af_budget: usize,
    pub adapt_every: usize,
    /// Global box half-width around `w0`, in units of `sigma0`.
    pub box_radius: f64,
    pub xi: f64,
}

impl Default for RemboConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            warm_starts: 10,
            laps: 300,
            sigma0: 0.0,
            af_budget: SearchBudget::DEFAULT_MAX,
            adapt_every: 10,
            box_radius: 10.0,
            xi: 0.0,
        }
    }
}

/// `w = clamp(origin + matrix * y)` with `y` restricted to `[-s, s]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub matrix: DMatrix<f64>,
    pub origin: Vec<f64>,
    pub half_width: f64,
    bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl Embedding {
    pub fn new(matrix: DMatrix<f64>, origin: Vec<f64>, half_width: f64) -> Result<Self> {
        check_dims(matrix.nrows(), origin.len(), "embedding rows vs origin")?;
        if matrix.ncols() == 0 {
            return Err(Error::invalid("embedding needs at least one column"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid("embedding box half-width must be positive"));
        }
        Ok(Self {
            matrix,
            origin,
            half_width,
            bounds: None,
        })
    }

    /// Gaussian embedding with `s = sqrt(d)`.
    pub fn random(origin: Vec<f64>, dim: usize, rng: &mut dyn RngCore) -> Result<Self> {
        let m = origin.len();
        if dim == 0 || dim > m {
            return Err(Error::invalid(format!("embedding dimension {dim} must be in 1..={m}")));
        }
        // row-major draw order so the stream does not depend on storage layout
        let mut data = vec![0.0; m * dim];
        for v in data.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let matrix = DMatrix::from_row_slice(m, dim, &data);
        Self::new(matrix, origin, (dim as f64).sqrt())
    }

    /// Clamp mapped points to `[lower, upper]`.
    pub fn with_clamp(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dims(lower.len(), self.origin.len(), "clamp box")?;
        check_dims(upper.len(), self.origin.len(), "clamp box")?;
        self.bounds = Some((lower, upper));
        Ok(self)
    }

    pub fn low_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn map(&self, y: &[f64]) -> Vec<f64> {
        let mut w = self.origin.clone();
        for (i, wi) in w.iter_mut().enumerate() {
            *wi += y.iter().enumerate().map(|(j, yj)| self.matrix[(i, j)] * yj).sum::<f64>();
        }
        if let Some((lo, hi)) = &self.bounds {
            for ((v, l), h) in w.iter_mut().zip(lo).zip(hi) {
                *v = v.clamp(*l, *h);
            }
        }
        w
    }
}

struct EmbeddedProposer {
    spec: AcquisitionSpec,
    lower: Vec<f64>,
    upper: Vec<f64>,
    step_size: f64,
}

impl Proposer for EmbeddedProposer {
    fn propose(
        &mut self,
        model: &GpModel,
        incumbent: &SearchIncumbent,
        budget: &mut SearchBudget,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<f64>> {
        let surface = AcquisitionSurface::new(model, self.spec, incumbent.reward);
        cmaes_propose(&surface, &incumbent.point, &self.lower, &self.upper, self.step_size, budget, rng)
    }
}

/// REMBO with a freshly drawn Gaussian embedding centred at `w0`, mapped
/// points clamped to `w0 ± box_radius * sigma0`.
pub fn rembo_run(
    objective: &dyn Objective,
    w0: &[f64],
    config: &RemboConfig,
    rng: &mut dyn RngCore,
) -> Result<RunOutcome> {
    if !(config.sigma0 >= 0.0 && config.sigma0.is_finite()) {
        return Err(Error::invalid(format!("sigma0 must be >= 0, got {}", config.sigma0)));
    }
    let clamp = BoxAround::new(w0, config.box_radius * config.sigma0);
    let embedding = Embedding::random(w0.to_vec(), config.dim, rng)?.with_clamp(clamp.lower, clamp.upper)?;
    rembo_run_with(objective, &embedding, config, rng)
}

/// REMBO with a caller-supplied embedding; `config.dim` is ignored.
pub fn rembo_run_with(
    objective: &dyn Objective,
    embedding: &Embedding,
    config: &RemboConfig,
    rng: &mut dyn RngCore,
) -> Result<RunOutcome> {
    let d = embedding.low_dim();
    let s = embedding.half_width;
    let settings = BoSettings {
        warm_starts: config.warm_starts,
        laps: config.laps,
        acquisition: AcquisitionSpec::ei(config.xi),
        af_budget: config.af_budget,
        adapt_every: config.adapt_every,
        initial_length_scale: s,
    };
    settings.validate()?;
    // the first warm start is the demonstration itself
    let uniform = Uniform::new_inclusive(-s, s);
    let mut warm = vec![vec![0.0; d]];
    for _ in 1..config.warm_starts {
        warm.push((0..d).map(|_| uniform.sample(rng)).collect());
    }
    let mut proposer = EmbeddedProposer {
        spec: settings.acquisition,
        lower: vec![-s; d],
        upper: vec![s; d],
        step_size: 0.5 * s,
    };
    run_bo(objective, &|y| embedding.map(y), warm, &settings, &mut proposer, rng)
}
