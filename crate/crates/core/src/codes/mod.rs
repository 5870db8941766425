//! Code pipelines: encode, coherent error, decode, correct, trace out the ancillae.
//!
//! Every code keeps its data spins first and its ancillae last.

pub mod counting;
pub mod kl;
pub mod mapping;
pub mod report;
pub mod stabilizer;
pub mod suppression;
pub mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, GateRecord};
use crate::dense::{equal_up_to_global_phase, DenseMatrix, PhaseMatch, OPERATOR_TOL};
use crate::error::{Error, Result};
use crate::operator::OperatorSum;
use crate::pauli::{Pauli, PauliString};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeName {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
    FirstOrder6q,
}

impl CodeName {
    pub const ALL: [CodeName; 5] = [
        CodeName::Fig1,
        CodeName::Fig3,
        CodeName::Fig4,
        CodeName::Fig5,
        CodeName::FirstOrder6q,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CodeName::Fig1 => "fig1",
            CodeName::Fig3 => "fig3",
            CodeName::Fig4 => "fig4",
            CodeName::Fig5 => "fig5",
            CodeName::FirstOrder6q => "first6",
        }
    }
}

impl fmt::Display for CodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(CodeName::Fig1),
            "fig3" => Ok(CodeName::Fig3),
            "fig4" => Ok(CodeName::Fig4),
            "fig5" => Ok(CodeName::Fig5),
            "first6" | "first_order_6q" => Ok(CodeName::FirstOrder6q),
            other => Err(Error::InvalidArgument(format!("unknown code `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaRequirement {
    PureZero,
    Arbitrary,
}

/// One row of a syndrome table: ancilla outcome bits and the data Pauli to apply.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeEntry {
    /// One bit per ancilla, in ancilla order.
    pub outcome: Vec<u8>,
    /// Correction on the full system; identity on the ancillae.
    pub correction: PauliString,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Correction {
    Fixed(Circuit),
    Syndrome(Vec<SyndromeEntry>),
}

#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub name: CodeName,
    pub nspins: usize,
    pub n_data: usize,
    pub encoder: Circuit,
    pub decoder: Circuit,
    pub correction: Correction,
    pub ancilla_requirement: AncillaRequirement,
    /// Errors the code corrects, identity included.
    pub declared_errors: Vec<PauliString>,
    /// An error outside the declared set that the code cannot correct.
    pub undeclared_probe: PauliString,
}

impl CodeSpec {
    pub fn data_spins(&self) -> Vec<usize> {
        (0..self.n_data).collect()
    }

    pub fn ancilla_spins(&self) -> Vec<usize> {
        (self.n_data..self.nspins).collect()
    }

    pub fn n_ancillae(&self) -> usize {
        self.nspins - self.n_data
    }

    pub fn encoder_unitary(&self) -> DenseMatrix {
        self.encoder.unitary()
    }

    pub fn decoder_unitary(&self) -> DenseMatrix {
        self.decoder.unitary()
    }

    pub fn correction_unitary(&self) -> DenseMatrix {
        match &self.correction {
            Correction::Fixed(c) => c.unitary(),
            Correction::Syndrome(entries) => syndrome_unitary(self.nspins, self.n_data, entries),
        }
    }

    /// decoder * encoder against the identity, up to global phase.
    pub fn roundtrip(&self) -> PhaseMatch {
        let u = self.decoder_unitary().matmul(&self.encoder_unitary());
        equal_up_to_global_phase(&u, &DenseMatrix::identity(u.dim()), OPERATOR_TOL)
    }

    /// `encoder |i>_data |0...0>_anc` for every data basis state `i`.
    pub fn code_space_basis(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << self.nspins;
        let na = self.n_ancillae();
        (0..1usize << self.n_data)
            .map(|i| {
                let mut psi = vec![ZERO; dim];
                psi[i << na] = ONE;
                self.encoder.apply_state(&mut psi);
                psi
            })
            .collect()
    }

    pub fn record(&self) -> CodeRecord {
        CodeRecord {
            schema: 1,
            name: self.name.as_str().to_string(),
            nspins: self.nspins,
            data_spins: self.data_spins().iter().map(|k| k + 1).collect(),
            ancilla_spins: self.ancilla_spins().iter().map(|k| k + 1).collect(),
            ancilla_requirement: self.ancilla_requirement,
            encoder: self.encoder.to_records(),
            decoder: self.decoder.to_records(),
            correction: match &self.correction {
                Correction::Fixed(c) => CorrectionRecord::Fixed { gates: c.to_records() },
                Correction::Syndrome(entries) => CorrectionRecord::Syndrome {
                    table: entries
                        .iter()
                        .map(|e| SyndromeRecord {
                            outcome: e.outcome.iter().map(|b| char::from(b'0' + b)).collect(),
                            correction: e.correction.label_string()[..self.n_data].to_string(),
                        })
                        .collect(),
                },
            },
            declared_errors: self.declared_errors.iter().map(|p| p.label_string()).collect(),
        }
    }
}

/// Serializable description of a built code (spin indices 1-based).
#[derive(Clone, Debug, Serialize)]
pub struct CodeRecord {
    pub schema: u32,
    pub name: String,
    pub nspins: usize,
    pub data_spins: Vec<usize>,
    pub ancilla_spins: Vec<usize>,
    pub ancilla_requirement: AncillaRequirement,
    pub encoder: Vec<GateRecord>,
    pub decoder: Vec<GateRecord>,
    pub correction: CorrectionRecord,
    pub declared_errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrectionRecord {
    Fixed { gates: Vec<GateRecord> },
    Syndrome { table: Vec<SyndromeRecord> },
}

#[derive(Clone, Debug, Serialize)]
pub struct SyndromeRecord {
    pub outcome: String,
    /// Pauli labels on the data spins.
    pub correction: String,
}

/// `sum_s P_s(ancilla) (x) C_s`, identity on unlisted outcomes.
fn syndrome_unitary(nspins: usize, n_data: usize, entries: &[SyndromeEntry]) -> DenseMatrix {
    let na = nspins - n_data;
    let dim = 1usize << nspins;
    let mut by_outcome: BTreeMap<usize, &PauliString> = BTreeMap::new();
    for e in entries {
        let key = e.outcome.iter().fold(0usize, |acc, b| (acc << 1) | *b as usize);
        by_outcome.insert(key, &e.correction);
    }
    let mut u = DenseMatrix::zeros(dim);
    for c in 0..dim {
        let anc = c & ((1 << na) - 1);
        let mut col = vec![ZERO; dim];
        col[c] = ONE;
        let col = match by_outcome.get(&anc) {
            Some(p) => p.apply(&col),
            None => col,
        };
        for (r, z) in col.into_iter().enumerate() {
            u[(r, c)] = z;
        }
    }
    u
}

/// Decode each error through `encoder` and tabulate the ancilla flips and data residue.
pub fn derive_syndrome_table(
    encoder: &Circuit,
    n_data: usize,
    errors: &[PauliString],
) -> Result<Vec<SyndromeEntry>> {
    let n = encoder.nspins();
    let u = encoder.unitary();
    let mut table: Vec<SyndromeEntry> = Vec::new();
    for e in errors {
        let decoded = OperatorSum::from_dense(&u.adjoint().matmul(&OperatorSum::from_pauli(e).to_dense()?).matmul(&u));
        let strings = decoded.pauli_strings();
        if strings.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "error {} does not decode to a single Pauli string",
                e.label_string()
            )));
        }
        let labels = strings[0].labels();
        let outcome: Vec<u8> = labels[n_data..].iter().map(|p| p.has_x() as u8).collect();
        let mut corr = labels.to_vec();
        for p in corr.iter_mut().skip(n_data) {
            *p = Pauli::I;
        }
        let correction = PauliString::new(corr)?;
        match table.iter().find(|t| t.outcome == outcome) {
            Some(t) if t.correction != correction => {
                return Err(Error::InvalidArgument(format!(
                    "syndrome {:?} is ambiguous between corrections {} and {}",
                    outcome, t.correction, correction
                )))
            }
            Some(_) => {}
            None => table.push(SyndromeEntry { outcome, correction }),
        }
    }
    table.retain(|t| !t.correction.is_identity());
    debug_assert!(n >= n_data);
    Ok(table)
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("static label")
}

fn fig1_encoder() -> Circuit {
    Circuit::from_gates(
        3,
        vec![
            Gate::cnot(0, 1),
            Gate::cnot(0, 2),
            Gate::Hadamard(0),
            Gate::Hadamard(1),
            Gate::Hadamard(2),
        ],
    )
    .expect("valid")
}

pub fn build_code(which: CodeName) -> CodeSpec {
    match which {
        CodeName::Fig1 => {
            let encoder = fig1_encoder();
            CodeSpec {
                name: which,
                nspins: 3,
                n_data: 2,
                decoder: encoder.inverse(),
                encoder,
                correction: Correction::Fixed(Circuit::from_gates(3, vec![Gate::cnot(2, 0)]).expect("valid")),
                ancilla_requirement: AncillaRequirement::PureZero,
                declared_errors: vec![ps("III"), ps("ZZI")],
                undeclared_probe: ps("ZII"),
            }
        }
        CodeName::Fig3 => {
            let encoder = mapping::symmetric_encoder();
            CodeSpec {
                name: which,
                nspins: 3,
                n_data: 2,
                decoder: encoder.inverse(),
                encoder,
                correction: Correction::Fixed(Circuit::new(3).expect("valid")),
                ancilla_requirement: AncillaRequirement::Arbitrary,
                declared_errors: vec![ps("III"), ps("ZZI")],
                undeclared_probe: ps("ZII"),
            }
        }
        CodeName::Fig4 => {
            let encoder = Circuit::from_gates(
                3,
                vec![
                    Gate::cnot(0, 1),
                    Gate::cnot(0, 2),
                    Gate::Hadamard(0),
                    Gate::Hadamard(1),
                    Gate::Hadamard(2),
                ],
            )
            .expect("valid");
            CodeSpec {
                name: which,
                nspins: 3,
                n_data: 1,
                decoder: encoder.inverse(),
                encoder,
                correction: Correction::Fixed(
                    Circuit::from_gates(3, vec![Gate::Toffoli { c1: 1, c2: 2, target: 0 }]).expect("valid"),
                ),
                ancilla_requirement: AncillaRequirement::PureZero,
                declared_errors: vec![ps("III"), ps("ZII"), ps("IZI"), ps("IIZ")],
                undeclared_probe: ps("ZZI"),
            }
        }
        CodeName::Fig5 => {
            let encoder = Circuit::from_gates(2, vec![Gate::Hadamard(0), Gate::Hadamard(1)]).expect("valid");
            CodeSpec {
                name: which,
                nspins: 2,
                n_data: 1,
                decoder: encoder.inverse(),
                encoder,
                correction: Correction::Fixed(Circuit::from_gates(2, vec![Gate::cnot(1, 0)]).expect("valid")),
                ancilla_requirement: AncillaRequirement::PureZero,
                declared_errors: vec![ps("II"), ps("ZZ")],
                undeclared_probe: ps("ZI"),
            }
        }
        CodeName::FirstOrder6q => stabilizer::build_first_order_code().1,
    }
}

/// `prod_j exp(-i phi_j/2 P_j)`; the factors must commute for the order not to matter.
pub fn coherent_error(nspins: usize, terms: &[(PauliString, f64)]) -> Result<DenseMatrix> {
    let gates = terms
        .iter()
        .map(|(p, phi)| Gate::PauliExp {
            pauli: p.clone(),
            theta: phi / 2.0,
        })
        .collect();
    Ok(Circuit::from_gates(nspins, gates)?.unitary())
}

/// `exp(-i phi/2 Z_k Z_l)`
pub fn zz_error(nspins: usize, k: usize, l: usize, phi: f64) -> DenseMatrix {
    coherent_error(nspins, &[(PauliString::z_on(nspins, &[k, l]), phi)]).expect("valid spins")
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub encoded: OperatorSum,
    pub decoded: OperatorSum,
    pub final_state: OperatorSum,
    /// Final state with the ancillae traced out.
    pub data_state: OperatorSum,
    /// z-basis populations of the ancilla-reduced decoded state, indexed by outcome.
    pub syndrome: Vec<f64>,
    /// Normalized Hilbert-Schmidt overlap with the input data operator, clamped to [0, 1].
    pub fidelity: f64,
    /// Max-abs deviation of `data_state` from `Tr(ancilla) * data input`.
    pub data_deviation: f64,
}

fn check_error(u: &DenseMatrix, dim: usize) -> Result<()> {
    if u.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: u.dim(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation >= OPERATOR_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

fn is_ground_projector(a: &OperatorSum) -> Result<bool> {
    let d = a.to_dense()?;
    let mut target = DenseMatrix::zeros(d.dim());
    target[(0, 0)] = ONE;
    Ok(d.approx_eq(&target, OPERATOR_TOL))
}

/// Normalized Hilbert-Schmidt overlap, clamped to [0, 1].
pub fn hs_fidelity(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let inner: Complex64 = a.data().iter().zip(b.data()).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.data().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.data().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 1.0 } else { 0.0 };
    }
    (inner.re / (na * nb)).clamp(0.0, 1.0)
}

/// Operator-level pipeline on `data (x) ancilla` with the error unitary applied between encode and decode.
pub fn run_pipeline(
    code: &CodeSpec,
    data_state: &OperatorSum,
    ancilla_state: &OperatorSum,
    error: &DenseMatrix,
) -> Result<PipelineResult> {
    if data_state.nspins() != code.n_data {
        return Err(Error::SpinMismatch {
            left: code.n_data,
            right: data_state.nspins(),
        });
    }
    if ancilla_state.nspins() != code.n_ancillae() {
        return Err(Error::SpinMismatch {
            left: code.n_ancillae(),
            right: ancilla_state.nspins(),
        });
    }
    if code.ancilla_requirement == AncillaRequirement::PureZero && !is_ground_projector(ancilla_state)? {
        return Err(Error::WrongAncillaState {
            code: code.name.to_string(),
        });
    }
    let dim = 1usize << code.nspins;
    check_error(error, dim)?;

    let rho = data_state.kron(ancilla_state).to_dense()?;
    let encoded = rho.conjugated_by(&code.encoder_unitary());
    let decoded = encoded.conjugated_by(error).conjugated_by(&code.decoder_unitary());
    let corrected = decoded.conjugated_by(&code.correction_unitary());

    let ancillae = code.ancilla_spins();
    let data_out = corrected.partial_trace(&ancillae);
    let data_in = data_state.to_dense()?.scale(ancilla_state.trace());
    let syndrome = decoded
        .partial_trace(&code.data_spins())
        .diagonal()
        .iter()
        .map(|z| z.re)
        .collect();
    Ok(PipelineResult {
        encoded: OperatorSum::from_dense(&encoded),
        decoded: OperatorSum::from_dense(&decoded),
        final_state: OperatorSum::from_dense(&corrected),
        data_state: OperatorSum::from_dense(&data_out),
        syndrome,
        fidelity: hs_fidelity(&data_in, &data_out),
        data_deviation: data_out.max_abs_diff(&data_in),
    })
}

#[derive(Clone, Debug)]
pub struct PurePipelineResult {
    pub encoded: Vec<Complex64>,
    pub decoded: Vec<Complex64>,
    pub corrected: Vec<Complex64>,
    pub data_density: DenseMatrix,
    /// `<psi| rho_data |psi>`
    pub fidelity: f64,
}

/// State-vector pipeline with the ancillae in `|0...0>`.
pub fn run_pure(code: &CodeSpec, data: &[Complex64], error: &DenseMatrix) -> Result<PurePipelineResult> {
    let dd = 1usize << code.n_data;
    if data.len() != dd {
        return Err(Error::DimensionMismatch {
            left: dd,
            right: data.len(),
        });
    }
    let dim = 1usize << code.nspins;
    check_error(error, dim)?;
    let na = code.n_ancillae();
    let mut psi = vec![ZERO; dim];
    for (i, a) in data.iter().enumerate() {
        psi[i << na] = *a;
    }
    code.encoder.apply_state(&mut psi);
    let encoded = psi.clone();
    let mut psi = error.apply(&psi);
    code.decoder.apply_state(&mut psi);
    let decoded = psi.clone();
    let corrected = code.correction_unitary().apply(&psi);
    let data_density = DenseMatrix::outer(&corrected).partial_trace(&code.ancilla_spins());
    let fidelity = data_density.apply(data).iter().zip(data).map(|(a, b)| b.conj() * a).sum::<Complex64>().re;
    Ok(PurePipelineResult {
        encoded,
        decoded,
        corrected,
        data_density,
        fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn names_round_trip() {
        for n in CodeName::ALL {
            assert_eq!(n.as_str().parse::<CodeName>().unwrap(), n);
        }
        assert!("fig2".parse::<CodeName>().is_err());
    }

    #[test]
    fn every_code_decodes_its_own_encoding() {
        for n in CodeName::ALL {
            assert!(build_code(n).roundtrip().equal, "{n}");
        }
    }

    #[test]
    fn fig1_without_error_is_trivial() {
        let code = build_code(CodeName::Fig1);
        let data = [ONE, ZERO, ZERO, ZERO];
        let r = run_pure(&code, &data, &DenseMatrix::identity(8)).unwrap();
        assert!((r.corrected[0] - ONE).norm() < 1e-12);
        assert!((r.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig5_full_error_flips_data_and_sets_syndrome() {
        let code = build_code(CodeName::Fig5);
        let (a, b) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let r = run_pure(&code, &[a, b], &zz_error(2, 0, 1, PI)).unwrap();
        // (a|1> + b|0>)|1>, up to a global phase
        let expect = [ZERO, b, ZERO, a];
        let overlap: Complex64 = expect.iter().zip(&r.decoded).map(|(e, d)| e.conj() * d).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        assert!((r.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_zero_codes_reject_mixed_ancilla() {
        let code = build_code(CodeName::Fig1);
        let data = OperatorSum::single(2, 0, Pauli::X);
        let anc = OperatorSum::identity(1).scale_real(0.5);
        assert!(matches!(
            run_pipeline(&code, &data, &anc, &DenseMatrix::identity(8)),
            Err(Error::WrongAncillaState { .. })
        ));
        let bad = DenseMatrix::identity(8).scale(Complex64::new(1.1, 0.0));
        assert!(matches!(
            run_pipeline(&code, &data, &OperatorSum::e_plus(1, 0), &bad),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn fig1_operator_pipeline_recovers_sx1() {
        let code = build_code(CodeName::Fig1);
        let data = OperatorSum::single(2, 0, Pauli::X);
        for phi in [0.0, 0.7, PI / 2.0, PI] {
            let r = run_pipeline(&code, &data, &OperatorSum::e_plus(1, 0), &zz_error(3, 0, 1, phi)).unwrap();
            assert!(r.data_deviation < 1e-12);
            assert!((r.fidelity - 1.0).abs() < 1e-12);
            // a maximally mixed data input gives syndrome populations cos^2(phi/2), sin^2(phi/2)
            let mixed = OperatorSum::identity(2).scale_real(0.25);
            let r = run_pipeline(&code, &mixed, &OperatorSum::e_plus(1, 0), &zz_error(3, 0, 1, phi)).unwrap();
            assert!((r.syndrome[0] - (phi / 2.0).cos().powi(2)).abs() < 1e-12);
            assert!((r.syndrome[1] - (phi / 2.0).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn records_are_one_based() {
        let rec = build_code(CodeName::Fig4).record();
        assert_eq!(rec.data_spins, vec![1]);
        assert_eq!(rec.ancilla_spins, vec![2, 3]);
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"kind\":\"toffoli\""));
    }
}
