//! Seeded random inputs for sweeps: states, density operators and couplings.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::codes::suppression::{all_pairs, Coupling};
use crate::dense::DenseMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector of length `dim`.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Unit-trace density operator `G G^dagger / Tr` from a Ginibre matrix.
pub fn random_density(rng: &mut impl Rng, nspins: usize) -> DenseMatrix {
    let dim = 1 << nspins;
    let g = DenseMatrix::from_fn(dim, |_, _| gaussian(rng));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    rho.scale(Complex64::new(1.0 / tr, 0.0))
}

/// Every pair coupled, `J` uniform in `[lo, hi]` Hz.
pub fn random_couplings(rng: &mut impl Rng, nspins: usize, lo: f64, hi: f64) -> Vec<Coupling> {
    all_pairs(nspins, |_, _| rng.random_range(lo..=hi))
}
