//! Spin systems: offsets, scalar couplings and relaxation constants.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::OperatorSum;
use crate::pauli::{PauliString, MAX_SPINS};

/// Weak coupling is assumed to hold when `|J| < WEAK_COUPLING_RATIO * |delta offset|`.
pub const WEAK_COUPLING_RATIO: f64 = 0.1;

pub const BUNDLED_ALANINE: &str = include_str!("../../fixtures/alanine.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinRecord {
    pub label: String,
    pub offset_hz: f64,
    #[serde(default)]
    pub t1_s: Option<f64>,
    #[serde(default)]
    pub t2_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingRecord {
    /// 1-based spin pair.
    pub spins: [usize; 2],
    pub j_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub name: String,
    pub spins: Vec<SpinRecord>,
    #[serde(default)]
    pub couplings: Vec<CouplingRecord>,
}

/// Spins in the rotating frame. Offsets and couplings are in Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem {
    pub name: String,
    pub labels: Vec<String>,
    pub offsets_hz: Vec<f64>,
    /// Symmetric, zero diagonal.
    pub j_hz: Vec<Vec<f64>>,
    pub t1_s: Vec<Option<f64>>,
    pub t2_s: Vec<Option<f64>>,
}

impl SpinSystem {
    /// Uncoupled on-resonance spins.
    pub fn new(nspins: usize) -> Result<Self> {
        if nspins == 0 || nspins > MAX_SPINS {
            return Err(Error::DimensionOverflow {
                nspins,
                max: MAX_SPINS,
            });
        }
        Ok(Self {
            name: String::new(),
            labels: (1..=nspins).map(|k| format!("S{k}")).collect(),
            offsets_hz: vec![0.0; nspins],
            j_hz: vec![vec![0.0; nspins]; nspins],
            t1_s: vec![None; nspins],
            t2_s: vec![None; nspins],
        })
    }

    pub fn alanine() -> Self {
        Self::from_json(BUNDLED_ALANINE).expect("bundled fixture is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(s)?)
    }

    pub fn from_record(r: &SystemRecord) -> Result<Self> {
        let mut sys = Self::new(r.spins.len())?;
        sys.name = r.name.clone();
        for (k, s) in r.spins.iter().enumerate() {
            sys.labels[k] = s.label.clone();
            sys.offsets_hz[k] = s.offset_hz;
            sys.t1_s[k] = s.t1_s;
            sys.t2_s[k] = s.t2_s;
        }
        for c in &r.couplings {
            let [a, b] = c.spins;
            let n = sys.nspins();
            for i in [a, b] {
                if i == 0 || i > n {
                    return Err(Error::IndexOutOfRange { index: i, nspins: n });
                }
            }
            if a == b {
                return Err(Error::RepeatedIndex);
            }
            sys.set_coupling(a - 1, b - 1, c.j_hz);
        }
        Ok(sys)
    }

    pub fn record(&self) -> SystemRecord {
        let n = self.nspins();
        let mut couplings = Vec::new();
        for k in 0..n {
            for l in k + 1..n {
                if self.j_hz[k][l] != 0.0 {
                    couplings.push(CouplingRecord {
                        spins: [k + 1, l + 1],
                        j_hz: self.j_hz[k][l],
                    });
                }
            }
        }
        SystemRecord {
            name: self.name.clone(),
            spins: (0..n)
                .map(|k| SpinRecord {
                    label: self.labels[k].clone(),
                    offset_hz: self.offsets_hz[k],
                    t1_s: self.t1_s[k],
                    t2_s: self.t2_s[k],
                })
                .collect(),
            couplings,
        }
    }

    pub fn nspins(&self) -> usize {
        self.offsets_hz.len()
    }

    pub fn j(&self, k: usize, l: usize) -> f64 {
        self.j_hz[k][l]
    }

    pub fn set_coupling(&mut self, k: usize, l: usize, hz: f64) {
        self.j_hz[k][l] = hz;
        self.j_hz[l][k] = hz;
    }

    /// Pairs violating `|J| << |delta offset|`. Pairs with equal offsets are skipped.
    pub fn weak_coupling_warnings(&self) -> Vec<String> {
        let n = self.nspins();
        let mut out = Vec::new();
        for k in 0..n {
            for l in k + 1..n {
                let j = self.j_hz[k][l].abs();
                let d = (self.offsets_hz[k] - self.offsets_hz[l]).abs();
                if j > 0.0 && d > 0.0 && j >= WEAK_COUPLING_RATIO * d {
                    out.push(format!(
                        "spins {} and {}: |J| = {j} Hz is not small against the {d} Hz offset difference",
                        k + 1,
                        l + 1
                    ));
                }
            }
        }
        out
    }

    /// `H = sum_k omega_k/2 Z_k + sum_{k<l} (pi/2) J_kl Z_k Z_l`, angular units.
    pub fn internal_hamiltonian(&self) -> OperatorSum {
        let n = self.nspins();
        let mut h = OperatorSum::zero(n);
        for k in 0..n {
            if self.offsets_hz[k] != 0.0 {
                let p = PauliString::z_on(n, &[k]);
                h.add_term(p.labels().to_vec(), Complex64::new(PI * self.offsets_hz[k], 0.0));
            }
            for l in k + 1..n {
                if self.j_hz[k][l] != 0.0 {
                    let p = PauliString::z_on(n, &[k, l]);
                    h.add_term(p.labels().to_vec(), Complex64::new(0.5 * PI * self.j_hz[k][l], 0.0));
                }
            }
        }
        h
    }

    /// Diagonal of the internal Hamiltonian in the computational basis (rad/s), with every
    /// term touching a spin in `removed` dropped.
    pub fn hamiltonian_diagonal(&self, removed: &[usize]) -> Vec<f64> {
        let n = self.nspins();
        let keep: Vec<bool> = (0..n).map(|k| !removed.contains(&k)).collect();
        (0..1usize << n)
            .map(|i| {
                let z = |k: usize| if i >> (n - 1 - k) & 1 == 0 { 1.0 } else { -1.0 };
                let mut e = 0.0;
                for k in (0..n).filter(|&k| keep[k]) {
                    e += PI * self.offsets_hz[k] * z(k);
                    for l in (k + 1..n).filter(|&l| keep[l]) {
                        e += 0.5 * PI * self.j_hz[k][l] * z(k) * z(l);
                    }
                }
                e
            })
            .collect()
    }
}
