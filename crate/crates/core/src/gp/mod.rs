//! Zero-mean Gaussian process regression over weight vectors.
//!
//! The model caches the Cholesky factor of `K_W = k(W, W) + (noise + jitter) I`
//! and `alpha = K_W^-1 z`. A small diagonal jitter is always added because the
//! deterministic simulator is modelled with zero observation noise, which makes
//! repeated or near-repeated inputs singular. The jitter starts at
//! `1e-8 * signal_variance` and grows by 10x up to `1e-2 * signal_variance`.

mod adapt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::kernel::KernelSpec;

pub use adapt::{adapt_hyperparams, HyperBounds};

pub(crate) const JITTER_START: f64 = 1e-8;
pub(crate) const JITTER_CEILING: f64 = 1e-2;
pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone)]
pub struct GpModel {
    kernel: KernelSpec,
    noise_variance: f64,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    /// `k(W, W)` without noise or jitter.
    gram: DMatrix<f64>,
    jitter: f64,
    chol: DMatrix<f64>,
    alpha: DVector<f64>,
}

/// Serializable snapshot of a model's data and hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSnapshot {
    pub kernel: KernelSpec,
    pub noise_variance: f64,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

/// Dense lower Cholesky factor, or `None` when a pivot is not positive.
fn cholesky_lower(k: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = k.nrows();
    let view = faer::mat::from_column_major_slice(k.as_slice(), n, n);
    let l = view.cholesky(faer::Side::Lower).ok()?.compute_l();
    Some(DMatrix::from_fn(n, n, |i, j| if i >= j { l.read(i, j) } else { 0.0 }))
}

/// Lower Cholesky factor of `gram + (noise + jitter) I`, escalating the jitter
/// until the factorization succeeds.
pub(crate) fn factorize(
    gram: &DMatrix<f64>,
    signal_variance: f64,
    noise_variance: f64,
) -> Result<(DMatrix<f64>, f64)> {
    let ceiling = JITTER_CEILING * signal_variance;
    let mut jitter = JITTER_START * signal_variance;
    loop {
        let mut k = gram.clone();
        for i in 0..k.nrows() {
            k[(i, i)] += noise_variance + jitter;
        }
        if let Some(chol) = cholesky_lower(&k) {
            return Ok((chol, jitter));
        }
        jitter *= 10.0;
        if jitter > ceiling * (1.0 + 1e-12) {
            return Err(Error::NotPositiveDefinite {
                jitter_ceiling: ceiling,
            });
        }
    }
}

/// Solves `L x = b` in place for lower-triangular, column-major `L`.
#[inline]
pub(crate) fn forward_substitute(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = b.len();
    let data = l.as_slice();
    for j in 0..n {
        let col = &data[j * n..(j + 1) * n];
        let bj = b[j] / col[j];
        b[j] = bj;
        if bj != 0.0 {
            for (bi, lij) in b[j + 1..].iter_mut().zip(&col[j + 1..]) {
                *bi -= lij * bj;
            }
        }
    }
}

/// Solves `L^T x = b` in place.
fn backward_substitute_transpose(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = b.len();
    let data = l.as_slice();
    for j in (0..n).rev() {
        let col = &data[j * n..(j + 1) * n];
        let dot: f64 = col[j + 1..].iter().zip(&b[j + 1..]).map(|(a, x)| a * x).sum();
        b[j] = (b[j] - dot) / col[j];
    }
}

pub(crate) fn cholesky_solve(l: &DMatrix<f64>, rhs: &[f64]) -> DVector<f64> {
    let mut x = rhs.to_vec();
    forward_substitute(l, &mut x);
    backward_substitute_transpose(l, &mut x);
    DVector::from_vec(x)
}

impl GpModel {
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// Jitter that made the last factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn chol_factor(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// `k(W, W) + (noise + jitter) I`, the matrix that was factorized.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mut k = self.gram.clone();
        for i in 0..k.nrows() {
            k[(i, i)] += self.noise_variance + self.jitter;
        }
        k
    }

    pub fn snapshot(&self) -> GpSnapshot {
        GpSnapshot {
            kernel: self.kernel.clone(),
            noise_variance: self.noise_variance,
            inputs: self.inputs.clone(),
            targets: self.targets.clone(),
        }
    }

    pub fn from_snapshot(snapshot: GpSnapshot) -> Result<Self> {
        gp_fit(
            snapshot.kernel,
            snapshot.noise_variance,
            snapshot.inputs,
            snapshot.targets,
        )
    }

    /// Same data, different kernel hyperparameters.
    pub fn with_kernel(&self, kernel: KernelSpec) -> Result<Self> {
        gp_fit(kernel, self.noise_variance, self.inputs.clone(), self.targets.clone())
    }

    fn from_gram(
        kernel: KernelSpec,
        noise_variance: f64,
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
        gram: DMatrix<f64>,
    ) -> Result<Self> {
        let (chol, jitter) = factorize(&gram, kernel.signal_variance, noise_variance)?;
        let alpha = cholesky_solve(&chol, &targets);
        Ok(Self {
            kernel,
            noise_variance,
            inputs,
            targets,
            gram,
            jitter,
            chol,
            alpha,
        })
    }

    /// Kernel vector between `query` and every training input.
    pub(crate) fn cross_cov(&self, query: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.inputs.iter().map(|x| self.kernel.eval_unchecked(query, x)));
    }

    /// Posterior mean and latent variance from a precomputed kernel vector.
    /// `kstar` is overwritten.
    #[inline]
    pub(crate) fn predict_from_cross(&self, kstar: &mut [f64]) -> (f64, f64) {
        let mean: f64 = kstar.iter().zip(self.alpha.iter()).map(|(k, a)| k * a).sum();
        forward_substitute(&self.chol, kstar);
        let explained: f64 = kstar.iter().map(|v| v * v).sum();
        let var = (self.kernel.signal_variance - explained).max(0.0);
        (mean, var)
    }

    /// Posterior mean and variance at a single query.
    pub fn predict(&self, query: &[f64]) -> Result<(f64, f64)> {
        check_dims(query.len(), self.dim(), "gp query")?;
        let mut k = Vec::with_capacity(self.len());
        self.cross_cov(query, &mut k);
        Ok(self.predict_from_cross(&mut k))
    }

    /// Scaled squared distances from `point` to every training input.
    pub fn scaled_sq_dists(&self, point: &[f64]) -> Result<Vec<f64>> {
        check_dims(point.len(), self.dim(), "distance query")?;
        Ok(self.inputs.iter().map(|x| self.kernel.sq_dist_unchecked(point, x)).collect())
    }

    /// Updates distances computed at `from` so they hold for `to`, touching
    /// only the coordinates that differ.
    pub(crate) fn shift_sq_dists(&self, dists: &mut [f64], from: &[f64], to: &[f64]) {
        for (k, (a, b)) in from.iter().zip(to).enumerate() {
            if a == b {
                continue;
            }
            let l = self.kernel.length_scale(k);
            let inv_l2 = 1.0 / (l * l);
            for (d, x) in dists.iter_mut().zip(&self.inputs) {
                let (da, db) = (a - x[k], b - x[k]);
                *d += (db * db - da * da) * inv_l2;
            }
        }
    }

    /// Precomputes the restriction of the posterior to the line through
    /// `point` along `axis`.
    pub fn axis_slice(&self, point: &[f64], axis: usize) -> Result<AxisSlice<'_>> {
        let dists = self.scaled_sq_dists(point)?;
        self.axis_slice_from(&dists, point, axis)
    }

    /// As [`GpModel::axis_slice`], reusing scaled distances from `point`.
    pub fn axis_slice_from(&self, dists: &[f64], point: &[f64], axis: usize) -> Result<AxisSlice<'_>> {
        check_dims(point.len(), self.dim(), "axis slice point")?;
        check_dims(dists.len(), self.len(), "axis slice distances")?;
        if axis >= point.len() {
            return Err(Error::invalid(format!("axis {axis} out of range for dimension {}", point.len())));
        }
        let l = self.kernel.length_scale(axis);
        let inv_l2 = 1.0 / (l * l);
        let (rest, column) = self
            .inputs
            .iter()
            .zip(dists)
            .map(|(x, full)| {
                let d = point[axis] - x[axis];
                (full - d * d * inv_l2, x[axis])
            })
            .unzip();
        Ok(AxisSlice {
            model: self,
            rest,
            column,
            inv_l2,
            scratch: Vec::with_capacity(self.len()),
        })
    }
}

/// Posterior along one coordinate with every other coordinate held fixed.
///
/// Evaluation costs one kernel call per training point plus a triangular
/// solve, independent of the input dimension.
pub struct AxisSlice<'a> {
    model: &'a GpModel,
    rest: Vec<f64>,
    column: Vec<f64>,
    inv_l2: f64,
    scratch: Vec<f64>,
}

impl AxisSlice<'_> {
    pub fn predict(&mut self, value: f64) -> (f64, f64) {
        let kernel = &self.model.kernel;
        self.scratch.clear();
        for (rest, x) in self.rest.iter().zip(&self.column) {
            let d = value - x;
            self.scratch.push(kernel.eval_sq_dist(rest + d * d * self.inv_l2));
        }
        self.model.predict_from_cross(&mut self.scratch)
    }
}

pub fn gp_fit(
    kernel: KernelSpec,
    noise_variance: f64,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
) -> Result<GpModel> {
    kernel.validate()?;
    if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
        return Err(Error::invalid(format!("noise variance must be >= 0, got {noise_variance}")));
    }
    if inputs.is_empty() {
        return Err(Error::invalid("gp_fit needs at least one observation"));
    }
    check_dims(inputs.len(), targets.len(), "gp inputs vs targets")?;
    let dim = inputs[0].len();
    for x in &inputs {
        check_dims(x.len(), dim, "gp inputs")?;
    }
    kernel.check_input_dim(dim)?;
    if let Some(z) = targets.iter().find(|z| !z.is_finite()) {
        return Err(Error::invalid(format!("non-finite target {z}")));
    }
    let n = inputs.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        gram[(i, i)] = kernel.signal_variance;
        for j in 0..i {
            let k = kernel.eval_unchecked(&inputs[i], &inputs[j]);
            gram[(i, j)] = k;
            gram[(j, i)] = k;
        }
    }
    GpModel::from_gram(kernel, noise_variance, inputs, targets, gram)
}

/// Per-query posterior mean and marginal variance.
pub fn gp_posterior<Q: AsRef<[f64]>>(model: &GpModel, queries: &[Q]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut means = Vec::with_capacity(queries.len());
    let mut vars = Vec::with_capacity(queries.len());
    for q in queries {
        let (m, v) = model.predict(q.as_ref())?;
        means.push(m);
        vars.push(v);
    }
    Ok((means, vars))
}

/// Returns a model with one more observation. The Gram matrix is extended by
/// one row and the factorization is recomputed.
pub fn gp_update(model: &GpModel, input: Vec<f64>, target: f64) -> Result<GpModel> {
    check_dims(input.len(), model.dim(), "gp update input")?;
    if !target.is_finite() {
        return Err(Error::invalid(format!("non-finite target {target}")));
    }
    let n = model.len();
    let mut gram = model.gram.clone().resize(n + 1, n + 1, 0.0);
    for (j, x) in model.inputs.iter().enumerate() {
        let k = model.kernel.eval_unchecked(&input, x);
        gram[(n, j)] = k;
        gram[(j, n)] = k;
    }
    gram[(n, n)] = model.kernel.signal_variance;
    let mut inputs = model.inputs.clone();
    inputs.push(input);
    let mut targets = model.targets.clone();
    targets.push(target);
    GpModel::from_gram(model.kernel.clone(), model.noise_variance, inputs, targets, gram)
}

/// `-1/2 z^T K^-1 z - 1/2 log det K - n/2 log 2 pi`.
pub fn log_marginal_likelihood(model: &GpModel) -> f64 {
    lml_from_parts(&model.chol, &model.alpha, &model.targets)
}

pub(crate) fn lml_from_parts(chol: &DMatrix<f64>, alpha: &DVector<f64>, targets: &[f64]) -> f64 {
    let fit: f64 = targets.iter().zip(alpha.iter()).map(|(z, a)| z * a).sum();
    let half_logdet: f64 = chol.diagonal().iter().map(|d| d.ln()).sum();
    -0.5 * fit - half_logdet - 0.5 * targets.len() as f64 * LN_2PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFamily;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matern1(sf2: f64, ls: Vec<f64>) -> KernelSpec {
        KernelSpec::new(KernelFamily::Matern1, sf2, ls).unwrap()
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    /// Mean and variance from a dense LU solve against the same covariance.
    fn dense_oracle(model: &GpModel, query: &[f64]) -> (f64, f64) {
        let lu = model.covariance().lu();
        let kstar = DVector::from_iterator(
            model.len(),
            model.inputs().iter().map(|x| model.kernel().eval_unchecked(query, x)),
        );
        let z = DVector::from_column_slice(model.targets());
        let mean = kstar.dot(&lu.solve(&z).unwrap());
        let var = model.kernel().signal_variance - kstar.dot(&lu.solve(&kstar).unwrap());
        (mean, var)
    }

    #[test]
    fn single_point_factor() {
        let m = gp_fit(matern1(2.0, vec![1.0]), 0.0, vec![vec![0.3]], vec![1.5]).unwrap();
        assert_eq!(m.chol_factor().shape(), (1, 1));
        assert_abs_diff_eq!(m.chol_factor()[(0, 0)], (2.0 + m.jitter()).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.jitter(), 2.0e-8, epsilon = 1e-20);
    }

    #[test]
    fn factor_reconstructs_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = random_points(&mut rng, 10, 4);
        let z: Vec<f64> = (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let m = gp_fit(matern1(1.5, vec![0.7, 1.1, 0.4, 2.0]), 0.0, pts, z).unwrap();
        let l = m.chol_factor();
        let k = m.covariance();
        let rel = (l * l.transpose() - &k).norm() / k.norm();
        assert!(rel < 1e-8, "relative reconstruction error {rel}");
    }

    #[test]
    fn duplicate_inputs_escalate_jitter() {
        let x = vec![0.2, -0.4];
        let m = gp_fit(matern1(1.0, vec![1.0]), 0.0, vec![x.clone(); 6], vec![3.0; 6]).unwrap();
        assert!(m.jitter() >= 1e-8);
        let (mean, var) = m.predict(&x).unwrap();
        assert!((mean - 3.0).abs() < 1e-3);
        assert!(var >= 0.0);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let k = matern1(1.0, vec![1.0]);
        assert!(gp_fit(k.clone(), 0.0, vec![], vec![]).is_err());
        assert!(gp_fit(k.clone(), 0.0, vec![vec![1.0]], vec![1.0, 2.0]).is_err());
        assert!(gp_fit(k.clone(), 0.0, vec![vec![1.0], vec![1.0, 2.0]], vec![1.0, 2.0]).is_err());
        assert!(gp_fit(k, -1.0, vec![vec![1.0]], vec![1.0]).is_err());
    }

    #[test]
    fn refit_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_points(&mut rng, 8, 3);
        let z: Vec<f64> = (0..8).map(|_| rng.gen()).collect();
        let a = gp_fit(matern1(1.0, vec![0.5]), 0.0, pts.clone(), z.clone()).unwrap();
        let b = gp_fit(matern1(1.0, vec![0.5]), 0.0, pts, z).unwrap();
        assert_eq!(a.chol_factor(), b.chol_factor());
        assert_eq!(a.alpha(), b.alpha());
    }

    #[test]
    fn interpolates_training_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = random_points(&mut rng, 12, 5);
        let z: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..20.0)).collect();
        let m = gp_fit(matern1(50.0, vec![1.0; 5]), 0.0, pts.clone(), z.clone()).unwrap();
        for (x, target) in pts.iter().zip(&z) {
            let (mean, var) = m.predict(x).unwrap();
            assert!((mean - target).abs() < 1e-6, "{mean} vs {target}");
            assert!(var <= 1e-6);
        }
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let m = gp_fit(matern1(4.0, vec![0.1, 0.1]), 0.0, vec![vec![0.0, 0.0]], vec![7.0]).unwrap();
        let (mean, var) = m.predict(&[100.0, -100.0]).unwrap();
        assert!(mean.abs() < 1e-12);
        assert_abs_diff_eq!(var, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn posterior_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = random_points(&mut rng, 20, 6);
        let z: Vec<f64> = (0..20).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let m = gp_fit(matern1(2.0, vec![0.8; 6]), 0.0, pts, z).unwrap();
        let queries = random_points(&mut rng, 5, 6);
        let (means, vars) = gp_posterior(&m, &queries).unwrap();
        for (i, q) in queries.iter().enumerate() {
            let (mo, vo) = dense_oracle(&m, q);
            assert!((means[i] - mo).abs() < 1e-8);
            assert!((vars[i] - vo.max(0.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn posterior_rejects_wrong_dimension() {
        let m = gp_fit(matern1(1.0, vec![1.0]), 0.0, vec![vec![0.0, 1.0]], vec![1.0]).unwrap();
        assert!(gp_posterior(&m, &[vec![0.0]]).is_err());
    }

    #[test]
    fn updates_match_refit() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts = random_points(&mut rng, 16, 4);
        let z: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..10.0)).collect();
        let kernel = matern1(9.0, vec![0.6, 0.9, 1.2, 0.3]);
        let mut model = gp_fit(kernel.clone(), 0.0, vec![pts[0].clone()], vec![z[0]]).unwrap();
        for i in 1..16 {
            model = gp_update(&model, pts[i].clone(), z[i]).unwrap();
        }
        let oneshot = gp_fit(kernel, 0.0, pts.clone(), z.clone()).unwrap();
        let queries = random_points(&mut rng, 10, 4);
        let (ma, va) = gp_posterior(&model, &queries).unwrap();
        let (mb, vb) = gp_posterior(&oneshot, &queries).unwrap();
        for i in 0..queries.len() {
            assert!((ma[i] - mb[i]).abs() < 1e-8);
            assert!((va[i] - vb[i]).abs() < 1e-8);
        }
        let (m0, _) = model.predict(&pts[0]).unwrap();
        assert!((m0 - z[0]).abs() < 1e-6);
    }

    #[test]
    fn update_with_duplicate_input() {
        let m = gp_fit(matern1(1.0, vec![1.0]), 0.0, vec![vec![0.5]], vec![1.0]).unwrap();
        let m = gp_update(&m, vec![0.5], 1.0).unwrap();
        assert_eq!(m.len(), 2);
        assert!(gp_update(&m, vec![0.5, 0.1], 1.0).is_err());
    }

    #[test]
    fn lml_single_zero_target() {
        let m = gp_fit(matern1(1.0, vec![1.0]), 0.0, vec![vec![0.0]], vec![0.0]).unwrap();
        // -1/2 ln(2 pi); the 1e-8 jitter shifts it by ~5e-9
        assert_abs_diff_eq!(log_marginal_likelihood(&m), -0.918_938_533_204_672_7, epsilon = 1e-7);
    }

    #[test]
    fn lml_matches_dense_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts = random_points(&mut rng, 10, 3);
        let z: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = gp_fit(matern1(1.3, vec![0.5, 0.7, 0.9]), 0.0, pts, z.clone()).unwrap();
        let k = m.covariance();
        let zv = DVector::from_vec(z);
        let lu = k.clone().lu();
        let fit = zv.dot(&lu.solve(&zv).unwrap());
        let dense = -0.5 * fit - 0.5 * k.determinant().ln() - 5.0 * (2.0 * std::f64::consts::PI).ln();
        assert!((log_marginal_likelihood(&m) - dense).abs() < 1e-6);
    }

    #[test]
    fn lml_zero_targets_is_complexity_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = random_points(&mut rng, 6, 2);
        let m = gp_fit(matern1(1.0, vec![0.4]), 0.0, pts, vec![0.0; 6]).unwrap();
        let logdet: f64 = m.chol_factor().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        let expected = -0.5 * logdet - 3.0 * (2.0 * std::f64::consts::PI).ln();
        assert_abs_diff_eq!(log_marginal_likelihood(&m), expected, epsilon = 1e-12);
    }

    #[test]
    fn axis_slice_matches_full_prediction() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts = random_points(&mut rng, 15, 5);
        let z: Vec<f64> = (0..15).map(|_| rng.gen_range(0.0..5.0)).collect();
        let m = gp_fit(matern1(3.0, vec![0.3, 0.6, 0.9, 1.2, 1.5]), 0.0, pts, z).unwrap();
        let mut point: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut slice = m.axis_slice(&point, 2).unwrap();
        for v in [-0.8, -0.1, 0.0, 0.4, 1.3] {
            let (ms, vs) = slice.predict(v);
            point[2] = v;
            let (mf, vf) = m.predict(&point).unwrap();
            assert!((ms - mf).abs() < 1e-10);
            assert!((vs - vf).abs() < 1e-10);
        }
        assert!(m.axis_slice(&point, 5).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let m = gp_fit(matern1(1.0, vec![0.5, 2.0]), 0.0, vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 2.0]).unwrap();
        let json = serde_json::to_string(&m.snapshot()).unwrap();
        let back = GpModel::from_snapshot(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.alpha(), m.alpha());
    }
}
