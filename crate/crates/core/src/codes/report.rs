//! Per-code verification: round trip, Knill-Laflamme on declared and probe errors,
//! exact recovery under random coherent declared errors, and ancilla independence.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::kl::{kl_check_code, kl_check_code_with_probe, KL_TOL};
use super::mapping::ancilla_flip;
use super::{build_code, coherent_error, run_pipeline, run_pure, zz_error, AncillaRequirement, CodeName, CodeSpec};
use crate::dense::OPERATOR_TOL;
use crate::error::Result;
use crate::operator::OperatorSum;
use crate::random::{random_density, random_state, seeded};

/// Tolerance on recovered data states.
pub const RECOVERY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct CodesOptions {
    pub codes: Vec<CodeName>,
    /// Random pure data states per declared error.
    pub trials: usize,
    /// Random ancilla density operators (each with a random angle) for codes that accept any ancilla.
    pub random_ancilla: usize,
    pub seed: u64,
}

impl Default for CodesOptions {
    fn default() -> Self {
        Self {
            codes: CodeName::ALL.to_vec(),
            trials: 5,
            random_ancilla: 0,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AncillaCheck {
    pub trials: usize,
    /// Largest `|Tr_a[final] - data|` over random ancillae and angles.
    pub max_data_deviation: f64,
    /// Largest `|final - data (x) X rho_a X|` at `phi = pi`.
    pub pi_flip_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeCheck {
    pub code: String,
    pub nspins: usize,
    pub n_data: usize,
    pub roundtrip_deviation: f64,
    pub kl_declared_satisfied: bool,
    pub kl_max_off_diagonal: f64,
    pub kl_max_diagonal_spread: f64,
    pub probe_error: String,
    pub kl_probe_fails: bool,
    /// Smallest fidelity over random data states and random coherent angles of each declared error.
    pub min_recovery_fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_ancilla: Option<AncillaCheck>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodesReport {
    pub operator_tolerance: f64,
    pub kl_tolerance: f64,
    pub recovery_tolerance: f64,
    pub seed: u64,
    pub codes: Vec<CodeCheck>,
    pub pass: bool,
}

fn ancilla_check(code: &CodeSpec, n: usize, rng: &mut impl Rng) -> Result<AncillaCheck> {
    let mut max_data: f64 = 0.0;
    let mut max_flip: f64 = 0.0;
    for _ in 0..n {
        let data = random_density(rng, code.n_data);
        let anc = random_density(rng, code.n_ancillae());
        let data_op = OperatorSum::from_dense(&data);
        let anc_op = OperatorSum::from_dense(&anc);
        let phi = rng.random_range(0.0..2.0 * PI);
        let r = run_pipeline(code, &data_op, &anc_op, &zz_error(code.nspins, 0, 1, phi))?;
        max_data = max_data.max(r.data_deviation);
        let r = run_pipeline(code, &data_op, &anc_op, &zz_error(code.nspins, 0, 1, PI))?;
        let want = data.kron(&anc);
        max_flip = max_flip.max(r.final_state.to_dense()?.max_abs_diff(&ancilla_flip(&want)));
    }
    Ok(AncillaCheck {
        trials: n,
        max_data_deviation: max_data,
        pi_flip_deviation: max_flip,
    })
}

pub fn check_code(which: CodeName, opts: &CodesOptions) -> Result<CodeCheck> {
    let code = build_code(which);
    let mut rng = seeded(opts.seed ^ (which as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let roundtrip = code.roundtrip();
    let kl = kl_check_code(&code)?;
    let probe = kl_check_code_with_probe(&code)?;

    let mut min_fid: f64 = 1.0;
    for e in code.declared_errors.iter().filter(|e| !e.is_identity()) {
        for _ in 0..opts.trials {
            let data = random_state(&mut rng, 1 << code.n_data);
            let phi = rng.random_range(0.0..2.0 * PI);
            let u = coherent_error(code.nspins, &[(e.clone(), phi)])?;
            min_fid = min_fid.min(run_pure(&code, &data, &u)?.fidelity);
        }
    }

    let random_ancilla = if opts.random_ancilla > 0 && code.ancilla_requirement == AncillaRequirement::Arbitrary {
        Some(ancilla_check(&code, opts.random_ancilla, &mut rng)?)
    } else {
        None
    };
    let pass = roundtrip.equal
        && kl.satisfied
        && !probe.satisfied
        && 1.0 - min_fid < RECOVERY_TOL
        && random_ancilla
            .as_ref()
            .is_none_or(|a| a.max_data_deviation < RECOVERY_TOL && a.pi_flip_deviation < RECOVERY_TOL);
    Ok(CodeCheck {
        code: which.to_string(),
        nspins: code.nspins,
        n_data: code.n_data,
        roundtrip_deviation: roundtrip.max_deviation,
        kl_declared_satisfied: kl.satisfied,
        kl_max_off_diagonal: kl.max_off_diagonal,
        kl_max_diagonal_spread: kl.max_diagonal_spread,
        probe_error: code.undeclared_probe.label_string(),
        kl_probe_fails: !probe.satisfied,
        min_recovery_fidelity: min_fid,
        random_ancilla,
        pass,
    })
}

pub fn verify_codes(opts: &CodesOptions) -> Result<CodesReport> {
    let codes = opts
        .codes
        .iter()
        .map(|c| check_code(*c, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CodesReport {
        operator_tolerance: OPERATOR_TOL,
        kl_tolerance: KL_TOL,
        recovery_tolerance: RECOVERY_TOL,
        seed: opts.seed,
        pass: codes.iter().all(|c| c.pass),
        codes,
    })
}
