//! X-type stabilizer codes against `Z_k Z_l` errors, and the six-spin first-order code.
//!
//! Spin `k` is assigned a column `c_k` of GF(2)^r; generator `i` is the X-string on
//! the spins whose column has bit `i` set. `Z_k Z_l` anticommutes with exactly the
//! generators in `c_k ^ c_l`, so distinct nonzero pairwise sums give a first-order code.

use serde::Serialize;

use super::{derive_syndrome_table, AncillaRequirement, CodeName, CodeSpec, Correction};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Columns for spins 1..6: 0000, 0001, 0010, 0100, 1000, 1111.
pub const FIRST_ORDER_COLUMNS: [u8; 6] = [0b0000, 0b0001, 0b0010, 0b0100, 0b1000, 0b1111];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizerCode {
    pub n: usize,
    pub k: usize,
    pub columns: Vec<u8>,
    /// X-type support rows, one per generator (bit `i` of the columns).
    pub generators: Vec<Vec<bool>>,
}

impl StabilizerCode {
    pub fn from_columns(columns: &[u8], n_generators: usize) -> Result<Self> {
        let n = columns.len();
        if n_generators >= n || n_generators > 8 {
            return Err(Error::InvalidArgument("too many generators for the column set".into()));
        }
        let generators = (0..n_generators)
            .map(|i| columns.iter().map(|c| c >> i & 1 == 1).collect())
            .collect();
        Ok(Self {
            n,
            k: n - n_generators,
            columns: columns.to_vec(),
            generators,
        })
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_strings(&self) -> Vec<PauliString> {
        self.generators
            .iter()
            .map(|row| {
                let labels = row.iter().map(|b| if *b { Pauli::X } else { Pauli::I }).collect();
                PauliString::new(labels).expect("valid length")
            })
            .collect()
    }

    /// Bit `i` set iff the error anticommutes with generator `i`.
    pub fn syndrome(&self, error: &PauliString) -> u8 {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let overlap = row
                    .iter()
                    .zip(error.labels())
                    .filter(|(g, p)| **g && p.has_z())
                    .count();
                ((overlap % 2) as u8) << i
            })
            .sum()
    }

    /// Syndrome as a bit string, highest generator first (e.g. `0001`).
    pub fn syndrome_bits(&self, error: &PauliString) -> String {
        let s = self.syndrome(error);
        (0..self.n_generators()).rev().map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// Identity plus every `Z_k Z_l`.
    pub fn first_order_errors(&self) -> Vec<PauliString> {
        let mut out = vec![PauliString::identity(self.n)];
        for k in 0..self.n {
            for l in k + 1..self.n {
                out.push(PauliString::z_on(self.n, &[k, l]));
            }
        }
        out
    }

    /// True iff the syndrome map is injective on `errors`.
    pub fn syndromes_distinct(&self, errors: &[PauliString]) -> bool {
        let mut seen: Vec<u8> = errors.iter().map(|e| self.syndrome(e)).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Row-reduce the generators so each has a pivot on its own ancilla (spins `k..n`).
    pub fn reduced_generators(&self) -> Result<Vec<(usize, Vec<bool>)>> {
        let mut rows = self.generators.clone();
        let mut pivots = Vec::new();
        for (r, col) in (self.k..self.n).enumerate() {
            let Some(p) = (r..rows.len()).find(|&i| rows[i][col]) else {
                return Err(Error::InvalidArgument(format!("no pivot available on spin {}", col + 1)));
            };
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r && rows[i][col] {
                    let pivot_row = rows[r].clone();
                    for (a, b) in rows[i].iter_mut().zip(pivot_row) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(col);
        }
        Ok(pivots.into_iter().zip(rows).collect())
    }

    /// Hadamard on each pivot ancilla, then CNOT from the pivot onto the rest of its row.
    pub fn encoder(&self) -> Result<Circuit> {
        let reduced = self.reduced_generators()?;
        let mut c = Circuit::new(self.n)?;
        for (pivot, _) in &reduced {
            c.push(Gate::Hadamard(*pivot))?;
        }
        for (pivot, row) in &reduced {
            for (q, on) in row.iter().enumerate() {
                if *on && q != *pivot {
                    c.push(Gate::cnot(*pivot, q))?;
                }
            }
        }
        Ok(c)
    }
}

/// Brute-force check that all pairwise sums of `columns` are distinct and nonzero.
pub fn pairwise_sums_distinct(columns: &[u8]) -> bool {
    let mut sums = Vec::new();
    for k in 0..columns.len() {
        for l in k + 1..columns.len() {
            sums.push(columns[k] ^ columns[l]);
        }
    }
    let nonzero = sums.iter().all(|s| *s != 0);
    sums.sort_unstable();
    nonzero && sums.windows(2).all(|w| w[0] != w[1])
}

/// The [[6,2]] code protecting two data spins against every single `Z_k Z_l`.
pub fn build_first_order_code() -> (StabilizerCode, CodeSpec) {
    let stab = StabilizerCode::from_columns(&FIRST_ORDER_COLUMNS, 4).expect("fixed column set");
    let encoder = stab.encoder().expect("fixed column set has ancilla pivots");
    let errors = stab.first_order_errors();
    let table = derive_syndrome_table(&encoder, stab.k, &errors).expect("first-order errors are distinguishable");
    let spec = CodeSpec {
        name: CodeName::FirstOrder6q,
        nspins: stab.n,
        n_data: stab.k,
        decoder: encoder.inverse(),
        encoder,
        correction: Correction::Syndrome(table),
        ancilla_requirement: AncillaRequirement::PureZero,
        declared_errors: errors,
        undeclared_probe: PauliString::z_on(stab.n, &[0]),
    };
    (stab, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_set_has_distinct_pair_sums() {
        assert!(pairwise_sums_distinct(&FIRST_ORDER_COLUMNS));
        assert!(!pairwise_sums_distinct(&[0, 1, 2, 3]));
    }

    #[test]
    fn syndromes_of_pair_errors() {
        let (stab, _) = build_first_order_code();
        assert_eq!(stab.syndrome_bits(&PauliString::z_on(6, &[0, 1])), "0001");
        assert_eq!(stab.syndrome_bits(&PauliString::z_on(6, &[0, 2])), "0010");
        assert_eq!(stab.syndrome_bits(&PauliString::identity(6)), "0000");
        assert!(stab.syndromes_distinct(&stab.first_order_errors()));
    }

    #[test]
    fn encoder_prepares_the_stabilizer_space() {
        let (stab, spec) = build_first_order_code();
        let basis = spec.code_space_basis();
        for g in stab.generator_strings() {
            for psi in &basis {
                let gpsi = g.apply(psi);
                let d: f64 = gpsi.iter().zip(psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(d < 1e-12, "generator {g} does not stabilize the code space");
            }
        }
    }

    #[test]
    fn syndrome_table_covers_all_fifteen_errors() {
        let (_, spec) = build_first_order_code();
        match &spec.correction {
            Correction::Syndrome(t) => {
                // errors leaving the data untouched need no entry
                assert!(t.len() <= 15);
                let mut outcomes: Vec<&Vec<u8>> = t.iter().map(|e| &e.outcome).collect();
                outcomes.sort();
                outcomes.dedup();
                assert_eq!(outcomes.len(), t.len());
            }
            _ => panic!("expected a syndrome correction"),
        }
    }
}
