//! Residual infidelity of a corrected code under the full coherent propagator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{coherent_error, run_pure, CodeSpec};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// A pair coupling `J_kl` in Hz between 0-based spins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coupling {
    pub k: usize,
    pub l: usize,
    pub hz: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuppressionResult {
    pub t: f64,
    pub infidelity: f64,
    /// Set when `max |J t| >= 1`, where the low-order expansion no longer applies.
    pub warning: Option<String>,
}

/// `prod_{k<l} exp(-i pi/2 J_kl t Z_k Z_l)`
pub fn pairwise_propagator(nspins: usize, couplings: &[Coupling], t: f64) -> Result<DenseMatrix> {
    let terms: Vec<(PauliString, f64)> = couplings
        .iter()
        .map(|c| {
            if c.k >= nspins || c.l >= nspins || c.k == c.l {
                return Err(Error::InvalidArgument(format!("bad coupling pair ({}, {})", c.k + 1, c.l + 1)));
            }
            // exp(-i phi/2 P) with phi = pi J t
            Ok((PauliString::z_on(nspins, &[c.k, c.l]), PI * c.hz * t))
        })
        .collect::<Result<_>>()?;
    coherent_error(nspins, &terms)
}

/// `exp(-i phi/2 sum_k Z_k)`
pub fn collective_z_propagator(nspins: usize, phi: f64) -> DenseMatrix {
    let terms: Vec<(PauliString, f64)> = (0..nspins).map(|k| (PauliString::z_on(nspins, &[k]), phi)).collect();
    coherent_error(nspins, &terms).expect("valid spins")
}

/// Run the corrected pipeline under all pair couplings for time `t`; return `1 - F`.
pub fn first_order_suppression_test(
    code: &CodeSpec,
    couplings: &[Coupling],
    t: f64,
    data: &[Complex64],
) -> Result<SuppressionResult> {
    if t < 0.0 {
        return Err(Error::InvalidArgument("evolution time must be non-negative".into()));
    }
    let max_jt = couplings.iter().map(|c| (c.hz * t).abs()).fold(0.0, f64::max);
    let warning = (max_jt >= 1.0).then(|| {
        format!("max |J t| = {max_jt:.3} >= 1: higher-order terms are not negligible")
    });
    let u = pairwise_propagator(code.nspins, couplings, t)?;
    let r = run_pure(code, data, &u)?;
    Ok(SuppressionResult {
        t,
        infidelity: (1.0 - r.fidelity).max(0.0),
        warning,
    })
}

/// Corrected infidelity under collective phase evolution by `phi`.
pub fn collective_suppression_test(code: &CodeSpec, phi: f64, data: &[Complex64]) -> Result<f64> {
    let r = run_pure(code, data, &collective_z_propagator(code.nspins, phi))?;
    Ok((1.0 - r.fidelity).max(0.0))
}

/// Every pair of spins with the given coupling function.
pub fn all_pairs(nspins: usize, mut hz: impl FnMut(usize, usize) -> f64) -> Vec<Coupling> {
    let mut out = Vec::new();
    for k in 0..nspins {
        for l in k + 1..nspins {
            out.push(Coupling { k, l, hz: hz(k, l) });
        }
    }
    out
}
