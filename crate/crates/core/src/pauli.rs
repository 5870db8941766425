//! Single-spin Pauli labels and phased multi-spin Pauli strings.
//!
//! Spin 0 is the leftmost tensor factor and the most significant bit of a
//! computational-basis index, so `|q1 q2 a>` reads left to right.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest spin count handled by the dense backend.
pub const MAX_SPINS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Product `self * other` as (power of i, result).
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn is_transverse(self) -> bool {
        self.has_x()
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | '1' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A power of i: the phase of a product of bare Pauli strings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    labels: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Result<Self> {
        Self::with_phase(labels, Phase::ONE)
    }

    pub fn with_phase(labels: Vec<Pauli>, phase: Phase) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_SPINS {
            return Err(Error::InvalidArgument(format!(
                "pauli string must cover 1..={MAX_SPINS} spins, got {}",
                labels.len()
            )));
        }
        Ok(Self { labels, phase })
    }

    pub fn identity(nspins: usize) -> Self {
        Self {
            labels: vec![Pauli::I; nspins],
            phase: Phase::ONE,
        }
    }

    /// A single Pauli on spin `k`, identity elsewhere.
    pub fn single(nspins: usize, k: usize, p: Pauli) -> Self {
        let mut labels = vec![Pauli::I; nspins];
        labels[k] = p;
        Self {
            labels,
            phase: Phase::ONE,
        }
    }

    /// `Z` on every listed spin.
    pub fn z_on(nspins: usize, spins: &[usize]) -> Self {
        let mut labels = vec![Pauli::I; nspins];
        for &k in spins {
            labels[k] = Pauli::Z;
        }
        Self {
            labels,
            phase: Phase::ONE,
        }
    }

    /// Z-string from a bitmask over spins (bit `k` = spin `k`).
    pub fn z_mask(nspins: usize, mask: u32) -> Self {
        let labels = (0..nspins)
            .map(|k| if mask >> k & 1 == 1 { Pauli::Z } else { Pauli::I })
            .collect();
        Self {
            labels,
            phase: Phase::ONE,
        }
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn nspins(&self) -> usize {
        self.labels.len()
    }

    pub fn weight(&self) -> usize {
        self.labels.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|p| *p == Pauli::I)
    }

    pub fn label_string(&self) -> String {
        self.labels.iter().map(|p| p.to_char()).collect()
    }

    /// X and Z support as basis-index bitmasks (spin 0 is the MSB).
    pub fn masks(&self) -> (usize, usize) {
        label_masks(&self.labels)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    pub fn adjoint(&self) -> PauliString {
        let phase = match self.phase.power() {
            1 => Phase::MINUS_I,
            3 => Phase::I,
            _ => self.phase,
        };
        PauliString {
            labels: self.labels.clone(),
            phase,
        }
    }

    pub fn without_phase(&self) -> PauliString {
        PauliString {
            labels: self.labels.clone(),
            phase: Phase::ONE,
        }
    }

    /// Apply to a state vector.
    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        let (xm, zm) = self.masks();
        let ny = self.labels.iter().filter(|p| **p == Pauli::Y).count() as u8;
        let base = (self.phase * Phase::from_power(ny)).to_complex();
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        for (c, amp) in state.iter().enumerate() {
            let sign = if (c & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[c ^ xm] = base * sign * amp;
        }
        out
    }
}

pub(crate) fn label_masks(labels: &[Pauli]) -> (usize, usize) {
    let n = labels.len();
    let mut xm = 0usize;
    let mut zm = 0usize;
    for (k, p) in labels.iter().enumerate() {
        let bit = 1usize << (n - 1 - k);
        if p.has_x() {
            xm |= bit;
        }
        if p.has_z() {
            zm |= bit;
        }
    }
    (xm, zm)
}

/// Multiply two Pauli strings, tracking the phase exactly.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    if a.nspins() != b.nspins() {
        return Err(Error::SpinMismatch {
            left: a.nspins(),
            right: b.nspins(),
        });
    }
    let mut power = a.phase.power() + b.phase.power();
    let labels = a
        .labels
        .iter()
        .zip(&b.labels)
        .map(|(x, y)| {
            let (k, p) = x.mul(*y);
            power += k;
            p
        })
        .collect();
    Ok(PauliString {
        labels,
        phase: Phase::from_power(power),
    })
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.label_string())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional phase prefix (`+`, `-`, `i`, `-i`) followed by labels.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, t)
        };
        let labels = rest
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidLabel(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        PauliString::with_phase(labels, phase)
    }
}
