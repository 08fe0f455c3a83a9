//! Stationary positive-definite kernels.
//!
//! One [`KernelSpec`] type serves both the scalar policy kernel over track
//! position and the ARD covariance over weight vectors used by the GP.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// Exponential covariance, `exp(-r)`.
    Matern1,
    /// `(1 + sqrt(3) r) exp(-sqrt(3) r)`.
    Matern3,
    /// `exp(-r^2 / 2)`.
    SquaredExponential,
}

impl KernelFamily {
    /// Correlation as a function of the scaled distance `r >= 0`.
    #[inline]
    pub fn correlation(self, r: f64) -> f64 {
        match self {
            KernelFamily::Matern1 => (-r).exp(),
            KernelFamily::Matern3 => {
                let s = SQRT_3 * r;
                (1.0 + s) * (-s).exp()
            }
            KernelFamily::SquaredExponential => (-0.5 * r * r).exp(),
        }
    }

    /// Correlation from the squared scaled distance. Slightly negative values
    /// from cancellation are treated as zero.
    #[inline]
    pub fn correlation_sq(self, d2: f64) -> f64 {
        let d2 = d2.max(0.0);
        match self {
            KernelFamily::SquaredExponential => (-0.5 * d2).exp(),
            _ => self.correlation(d2.sqrt()),
        }
    }
}

/// Kernel family plus hyperparameters.
///
/// `length_scales` holds either one shared scale or one scale per input
/// dimension (ARD).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub signal_variance: f64,
    pub length_scales: Vec<f64>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, signal_variance: f64, length_scales: Vec<f64>) -> Result<Self> {
        let spec = Self {
            family,
            signal_variance,
            length_scales,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Single shared length-scale.
    pub fn isotropic(family: KernelFamily, signal_variance: f64, length_scale: f64) -> Result<Self> {
        Self::new(family, signal_variance, vec![length_scale])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_variance > 0.0 && self.signal_variance.is_finite()) {
            return Err(Error::invalid(format!(
                "signal variance must be positive, got {}",
                self.signal_variance
            )));
        }
        if self.length_scales.is_empty() {
            return Err(Error::invalid("at least one length-scale is required"));
        }
        if let Some((i, l)) = self
            .length_scales
            .iter()
            .enumerate()
            .find(|(_, l)| !(**l > 0.0 && l.is_finite()))
        {
            return Err(Error::invalid(format!("length_scales[{i}] = {l} is not positive")));
        }
        Ok(())
    }

    pub fn is_ard(&self) -> bool {
        self.length_scales.len() > 1
    }

    /// Length-scale applied to input dimension `i`.
    #[inline]
    pub fn length_scale(&self, i: usize) -> f64 {
        if self.length_scales.len() == 1 {
            self.length_scales[0]
        } else {
            self.length_scales[i]
        }
    }

    /// Checks that the spec can be applied to inputs of dimension `dim`.
    pub fn check_input_dim(&self, dim: usize) -> Result<()> {
        if self.length_scales.len() != 1 {
            check_dims(self.length_scales.len(), dim, "kernel length-scales vs input")?;
        }
        Ok(())
    }

    /// Scaled squared distance between two points of equal dimension.
    pub fn sq_dist(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dims(u.len(), v.len(), "kernel inputs")?;
        self.check_input_dim(u.len())?;
        Ok(self.sq_dist_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn sq_dist_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        if self.length_scales.len() == 1 {
            let l = self.length_scales[0];
            u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (l * l)
        } else {
            u.iter()
                .zip(v)
                .zip(&self.length_scales)
                .map(|((a, b), l)| {
                    let d = (a - b) / l;
                    d * d
                })
                .sum()
        }
    }

    /// Kernel value from a precomputed scaled squared distance.
    #[inline]
    pub fn eval_sq_dist(&self, d2: f64) -> f64 {
        self.signal_variance * self.family.correlation_sq(d2)
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        self.eval_sq_dist(self.sq_dist_unchecked(u, v))
    }
}

/// `sum_i ((u_i - v_i) / l_i)^2`.
pub fn ard_sq_dist(u: &[f64], v: &[f64], length_scales: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len(), "ard_sq_dist inputs")?;
    check_dims(u.len(), length_scales.len(), "ard_sq_dist length-scales")?;
    Ok(u.iter()
        .zip(v)
        .zip(length_scales)
        .map(|((a, b), l)| {
            let d = (a - b) / l;
            d * d
        })
        .sum())
}

pub fn kernel_eval(spec: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    Ok(spec.eval_sq_dist(spec.sq_dist(u, v)?))
}

/// Cross-covariance matrix with entry `(i, j) = k(rows[i], cols[j])`.
pub fn gram_matrix<R, C>(spec: &KernelSpec, rows: &[R], cols: &[C]) -> Result<DMatrix<f64>>
where
    R: AsRef<[f64]>,
    C: AsRef<[f64]>,
{
    let dim = rows
        .first()
        .map(|r| r.as_ref().len())
        .or_else(|| cols.first().map(|c| c.as_ref().len()))
        .unwrap_or(0);
    for r in rows {
        check_dims(r.as_ref().len(), dim, "gram_matrix rows")?;
    }
    for c in cols {
        check_dims(c.as_ref().len(), dim, "gram_matrix cols")?;
    }
    if !rows.is_empty() {
        spec.check_input_dim(dim)?;
    }
    Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        spec.eval_unchecked(rows[i].as_ref(), cols[j].as_ref())
    }))
}
