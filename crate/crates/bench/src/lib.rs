//! Fixtures shared by the benchmarks.

use cdbo::gp::gp_fit;
use cdbo::{GpModel, KernelFamily, KernelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A GP over `n` random points in `[-1, 1]^m` with smooth random targets,
/// roughly what the optimiser holds after `n` laps.
pub fn random_model(n: usize, m: usize, seed: u64) -> GpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let zs = xs.iter().map(|x| x.iter().map(|v| v.sin()).sum::<f64>() / m as f64).collect();
    let kernel = KernelSpec::isotropic(KernelFamily::Matern1, 1.0, (m as f64).sqrt()).unwrap();
    gp_fit(kernel, 0.0, xs, zs).unwrap()
}
