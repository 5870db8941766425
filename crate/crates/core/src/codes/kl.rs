//! Knill-Laflamme correctability: `<i| E^dagger F |j> = alpha_EF delta_ij` on a code basis.

use num_complex::Complex64;
use serde::Serialize;

use super::CodeSpec;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub const ORTHONORMAL_TOL: f64 = 1e-10;
pub const KL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct KlReport {
    pub satisfied: bool,
    /// Largest `|<i|E^dagger F|j>|` with `i != j`.
    pub max_off_diagonal: f64,
    /// Largest spread of `<i|E^dagger F|i>` over the basis.
    pub max_diagonal_spread: f64,
    /// `alpha_EF`, row-major over the error list, as `[re, im]`.
    pub alpha: Vec<Vec<[f64; 2]>>,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn kl_check(basis: &[Vec<Complex64>], errors: &[PauliString]) -> Result<KlReport> {
    let mut dev: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((inner(a, b) - target).norm());
        }
    }
    if dev >= ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { deviation: dev });
    }
    let applied: Vec<Vec<Vec<Complex64>>> = errors
        .iter()
        .map(|e| basis.iter().map(|psi| e.apply(psi)).collect())
        .collect();
    let mut max_off: f64 = 0.0;
    let mut max_spread: f64 = 0.0;
    let mut alpha = Vec::with_capacity(errors.len());
    for ea in &applied {
        let mut row = Vec::with_capacity(errors.len());
        for fb in &applied {
            let diag: Vec<Complex64> = (0..basis.len()).map(|i| inner(&ea[i], &fb[i])).collect();
            let mean = diag.iter().sum::<Complex64>() / diag.len().max(1) as f64;
            for d in &diag {
                max_spread = max_spread.max((d - mean).norm());
            }
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    if i != j {
                        max_off = max_off.max(inner(&ea[i], &fb[j]).norm());
                    }
                }
            }
            row.push([mean.re, mean.im]);
        }
        alpha.push(row);
    }
    Ok(KlReport {
        satisfied: max_off < KL_TOL && max_spread < KL_TOL,
        max_off_diagonal: max_off,
        max_diagonal_spread: max_spread,
        alpha,
    })
}

/// The code's declared error set on its encoded basis.
pub fn kl_check_code(code: &CodeSpec) -> Result<KlReport> {
    kl_check(&code.code_space_basis(), &code.declared_errors)
}

/// The declared set plus the code's undeclared probe error; expected to fail.
pub fn kl_check_code_with_probe(code: &CodeSpec) -> Result<KlReport> {
    let mut errors = code.declared_errors.clone();
    errors.push(code.undeclared_probe.clone());
    kl_check(&code.code_space_basis(), &errors)
}
