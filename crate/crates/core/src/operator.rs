//! Sparse sums of Pauli strings with complex weights.
//!
//! Density (deviation) operators, Hamiltonians and propagators are all held
//! as [`OperatorSum`]s. Equality is decided on the dense form; the sparse
//! form only drops coefficients below the prune threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::pauli::{label_masks, Pauli, PauliString, Phase, MAX_SPINS};

pub const DEFAULT_PRUNE: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone)]
pub struct OperatorSum {
    nspins: usize,
    terms: BTreeMap<Vec<Pauli>, Complex64>,
    prune: f64,
}

impl OperatorSum {
    pub fn zero(nspins: usize) -> Self {
        Self {
            nspins,
            terms: BTreeMap::new(),
            prune: DEFAULT_PRUNE,
        }
    }

    pub fn identity(nspins: usize) -> Self {
        Self::zero(nspins).with_term(vec![Pauli::I; nspins], ONE)
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        Self::zero(p.nspins()).with_term(p.labels().to_vec(), p.phase().to_complex())
    }

    /// Build from `(labels, coefficient)` pairs, e.g. `[("ZZI", 0.5.into())]`.
    pub fn from_terms(nspins: usize, terms: &[(&str, Complex64)]) -> Result<Self> {
        let mut op = Self::zero(nspins);
        for (labels, c) in terms {
            let p: PauliString = labels.parse()?;
            if p.nspins() != nspins {
                return Err(Error::SpinMismatch {
                    left: nspins,
                    right: p.nspins(),
                });
            }
            op.add_term(p.labels().to_vec(), *c * p.phase().to_complex());
        }
        Ok(op)
    }

    /// Real-coefficient shorthand for [`OperatorSum::from_terms`].
    pub fn real(nspins: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let t: Vec<(&str, Complex64)> = terms.iter().map(|(l, c)| (*l, Complex64::new(*c, 0.0))).collect();
        Self::from_terms(nspins, &t)
    }

    /// A single Pauli on spin `k`.
    pub fn single(nspins: usize, k: usize, p: Pauli) -> Self {
        Self::from_pauli(&PauliString::single(nspins, k, p))
    }

    /// `E+ = (1 + Z)/2` on spin `k`.
    pub fn e_plus(nspins: usize, k: usize) -> Self {
        let mut op = Self::identity(nspins).scale(Complex64::new(0.5, 0.0));
        op.add_term(PauliString::single(nspins, k, Pauli::Z).labels().to_vec(), Complex64::new(0.5, 0.0));
        op
    }

    /// `E- = (1 - Z)/2` on spin `k`.
    pub fn e_minus(nspins: usize, k: usize) -> Self {
        let mut op = Self::identity(nspins).scale(Complex64::new(0.5, 0.0));
        op.add_term(PauliString::single(nspins, k, Pauli::Z).labels().to_vec(), Complex64::new(-0.5, 0.0));
        op
    }

    pub fn with_prune_threshold(mut self, tol: f64) -> Self {
        self.prune = tol;
        self.prune_small();
        self
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune
    }

    fn with_term(mut self, labels: Vec<Pauli>, c: Complex64) -> Self {
        self.add_term(labels, c);
        self
    }

    pub fn add_term(&mut self, labels: Vec<Pauli>, c: Complex64) {
        debug_assert_eq!(labels.len(), self.nspins);
        let total = self.terms.get(&labels).copied().unwrap_or(ZERO) + c;
        if total.norm() < self.prune {
            self.terms.remove(&labels);
        } else {
            self.terms.insert(labels, total);
        }
    }

    fn prune_small(&mut self) {
        let tol = self.prune;
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn nspins(&self) -> usize {
        self.nspins
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Pauli], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn coefficient(&self, labels: &str) -> Complex64 {
        let key: Option<Vec<Pauli>> = labels.chars().map(Pauli::from_char).collect();
        key.and_then(|k| self.terms.get(&k).copied()).unwrap_or(ZERO)
    }

    /// The Pauli strings present, with their phase folded out.
    pub fn pauli_strings(&self) -> Vec<PauliString> {
        self.terms
            .keys()
            .map(|k| PauliString::with_phase(k.clone(), Phase::ONE).expect("valid labels"))
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.nspins);
        out.prune = self.prune;
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * s);
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.conj();
        }
        out
    }

    /// `Tr(self)`, including the `2^N` identity weight.
    pub fn trace(&self) -> Complex64 {
        let id = vec![Pauli::I; self.nspins];
        self.terms.get(&id).copied().unwrap_or(ZERO) * (1u64 << self.nspins) as f64
    }

    /// Hilbert-Schmidt inner product `Tr(A^dagger B)`.
    pub fn hs_inner(&self, other: &OperatorSum) -> Complex64 {
        assert_eq!(self.nspins, other.nspins, "spin counts differ");
        let dim = (1u64 << self.nspins) as f64;
        self.terms
            .iter()
            .filter_map(|(k, a)| other.terms.get(k).map(|b| a.conj() * b))
            .sum::<Complex64>()
            * dim
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_inner(self).re.max(0.0).sqrt()
    }

    /// Pauli strings are Hermitian, so the sum is Hermitian iff every weight is real.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() < tol)
    }

    /// Tensor product `self (x) other`; `other` occupies the trailing spins.
    pub fn kron(&self, other: &OperatorSum) -> OperatorSum {
        let mut out = OperatorSum::zero(self.nspins + other.nspins);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut labels = a.clone();
                labels.extend_from_slice(b);
                out.add_term(labels, ca * cb);
            }
        }
        out
    }

    pub fn checked_mul(&self, other: &OperatorSum) -> Result<OperatorSum> {
        if self.nspins != other.nspins {
            return Err(Error::SpinMismatch {
                left: self.nspins,
                right: other.nspins,
            });
        }
        let mut out = OperatorSum::zero(self.nspins);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut power = 0u8;
                let labels: Vec<Pauli> = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let (k, p) = x.mul(*y);
                        power += k;
                        p
                    })
                    .collect();
                out.add_term(labels, ca * cb * Phase::from_power(power).to_complex());
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.nspins > MAX_SPINS {
            return Err(Error::DimensionOverflow {
                nspins: self.nspins,
                max: MAX_SPINS,
            });
        }
        let dim = 1usize << self.nspins;
        let mut m = DenseMatrix::zeros(dim);
        for (labels, coef) in &self.terms {
            let (xm, zm) = label_masks(labels);
            let ny = labels.iter().filter(|p| **p == Pauli::Y).count() as u8;
            let base = coef * Phase::from_power(ny).to_complex();
            for c in 0..dim {
                let sign = if (c & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                m[(c ^ xm, c)] += base * sign;
            }
        }
        Ok(m)
    }

    /// Expand a dense matrix in the Pauli basis: `c_P = Tr(P M) / 2^N`.
    pub fn from_dense(m: &DenseMatrix) -> OperatorSum {
        let n = m.nspins();
        let dim = m.dim();
        let mut out = OperatorSum::zero(n);
        let mut labels = vec![Pauli::I; n];
        loop {
            let (xm, zm) = label_masks(&labels);
            let ny = labels.iter().filter(|p| **p == Pauli::Y).count() as u8;
            let base = Phase::from_power(ny).to_complex();
            // Tr(P M) = sum_c P[c^x, c] M[c, c^x]
            let mut acc = ZERO;
            for c in 0..dim {
                let sign = if (c & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                acc += base * sign * m[(c, c ^ xm)];
            }
            out.add_term(labels.clone(), acc / dim as f64);
            if !next_labels(&mut labels) {
                break;
            }
        }
        out
    }

    /// Trace out the listed spins; surviving spins keep their relative order.
    pub fn partial_trace(&self, traced: &[usize]) -> Result<OperatorSum> {
        for &k in traced {
            if k >= self.nspins {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    nspins: self.nspins,
                });
            }
        }
        let mut mask = vec![false; self.nspins];
        for &k in traced {
            mask[k] = true;
        }
        let ntraced = mask.iter().filter(|m| **m).count();
        let factor = (1u64 << ntraced) as f64;
        let mut out = OperatorSum::zero(self.nspins - ntraced);
        out.prune = self.prune;
        for (labels, c) in &self.terms {
            if labels.iter().zip(&mask).any(|(p, t)| *t && *p != Pauli::I) {
                continue;
            }
            let kept: Vec<Pauli> = labels
                .iter()
                .zip(&mask)
                .filter(|(_, t)| !**t)
                .map(|(p, _)| *p)
                .collect();
            out.add_term(kept, c * factor);
        }
        Ok(out)
    }

    /// Split into coherence-order components via the raising/lowering expansion
    /// `X = s+ + s-`, `Y = -i s+ + i s-`, with `s+- = (X +- iY)/2`.
    pub fn coherence_decompose(&self) -> Vec<CoherenceComponent> {
        let half = Complex64::new(0.5, 0.0);
        let mut by_order: BTreeMap<i32, OperatorSum> = BTreeMap::new();
        for (labels, coef) in &self.terms {
            // partial expansions keyed by (order, labels so far)
            let mut partial: BTreeMap<(i32, Vec<Pauli>), Complex64> = BTreeMap::new();
            partial.insert((0, Vec::with_capacity(self.nspins)), *coef);
            for p in labels {
                let mut next = BTreeMap::new();
                for ((order, pre), c) in partial {
                    let mut push = |order: i32, q: Pauli, w: Complex64| {
                        let mut l = pre.clone();
                        l.push(q);
                        *next.entry((order, l)).or_insert(ZERO) += c * w;
                    };
                    match p {
                        Pauli::I | Pauli::Z => push(order, *p, ONE),
                        Pauli::X | Pauli::Y => {
                            // weights of s+ and s- in this factor
                            let (wp, wm) = if *p == Pauli::X { (ONE, ONE) } else { (-I, I) };
                            push(order + 1, Pauli::X, wp * half);
                            push(order + 1, Pauli::Y, wp * half * I);
                            push(order - 1, Pauli::X, wm * half);
                            push(order - 1, Pauli::Y, -wm * half * I);
                        }
                    }
                }
                partial = next;
            }
            for ((order, l), c) in partial {
                by_order
                    .entry(order)
                    .or_insert_with(|| OperatorSum::zero(self.nspins))
                    .add_term(l, c);
            }
        }
        by_order
            .into_iter()
            .filter(|(_, op)| !op.is_empty())
            .map(|(order, operator)| CoherenceComponent { order, operator })
            .collect()
    }

    /// The coherence-order-zero part (what survives a crusher gradient).
    pub fn zero_quantum(&self) -> OperatorSum {
        self.coherence_decompose()
            .into_iter()
            .find(|c| c.order == 0)
            .map(|c| c.operator)
            .unwrap_or_else(|| OperatorSum::zero(self.nspins))
    }

    /// Max-abs difference of the dense forms.
    pub fn dense_distance(&self, other: &OperatorSum) -> Result<f64> {
        Ok(self.to_dense()?.max_abs_diff(&other.to_dense()?))
    }

    pub fn records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(k, c)| TermRecord {
                labels: k.iter().map(|p| p.to_char()).collect(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn from_records(nspins: usize, records: &[TermRecord]) -> Result<OperatorSum> {
        let terms: Vec<(&str, Complex64)> = records
            .iter()
            .map(|r| (r.labels.as_str(), Complex64::new(r.re, r.im)))
            .collect();
        Self::from_terms(nspins, &terms)
    }
}

/// Advance labels through I,X,Y,Z^N in lexicographic order; false when exhausted.
fn next_labels(labels: &mut [Pauli]) -> bool {
    for p in labels.iter_mut().rev() {
        *p = match p {
            Pauli::I => Pauli::X,
            Pauli::X => Pauli::Y,
            Pauli::Y => Pauli::Z,
            Pauli::Z => {
                *p = Pauli::I;
                continue;
            }
        };
        return true;
    }
    false
}

/// `exp(-i theta P)`. For Hermitian `P` (phase +-1) this is `cos(theta) - i sin(theta) P`.
pub fn exp_pauli(p: &PauliString, theta: f64) -> OperatorSum {
    let lambda = p.phase().to_complex();
    let arg = Complex64::new(theta, 0.0) * lambda;
    let mut op = OperatorSum::identity(p.nspins()).scale(arg.cos());
    op.add_term(p.labels().to_vec(), -I * arg.sin());
    op
}

/// One JSON term of a serialized [`OperatorSum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub labels: String,
    pub re: f64,
    pub im: f64,
}

impl Serialize for OperatorSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.records().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let n = records
            .first()
            .map(|r| r.labels.chars().count())
            .ok_or_else(|| serde::de::Error::custom("empty term list has no spin count"))?;
        OperatorSum::from_records(n, &records).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct CoherenceComponent {
    pub order: i32,
    pub operator: OperatorSum,
}

impl fmt::Debug for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSum[{}](", self.nspins)?;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let l: String = k.iter().map(|p| p.to_char()).collect();
            if c.im.abs() < 1e-15 {
                write!(f, "{:+.6} {l}", c.re)?;
            } else {
                write!(f, "({:+.6}{:+.6}i) {l}", c.re, c.im)?;
            }
        }
        write!(f, ")")
    }
}

impl Add for &OperatorSum {
    type Output = OperatorSum;
    fn add(self, rhs: &OperatorSum) -> OperatorSum {
        assert_eq!(self.nspins, rhs.nspins, "spin counts differ");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }
}

impl Sub for &OperatorSum {
    type Output = OperatorSum;
    fn sub(self, rhs: &OperatorSum) -> OperatorSum {
        self + &(-rhs)
    }
}

impl Neg for &OperatorSum {
    type Output = OperatorSum;
    fn neg(self) -> OperatorSum {
        self.scale(-ONE)
    }
}

impl Mul for &OperatorSum {
    type Output = OperatorSum;
    /// Operator product; panics on mismatched spin counts (see [`OperatorSum::checked_mul`]).
    fn mul(self, rhs: &OperatorSum) -> OperatorSum {
        self.checked_mul(rhs).expect("spin counts differ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn op(n: usize, t: &[(&str, f64)]) -> OperatorSum {
        OperatorSum::real(n, t).unwrap()
    }

    #[test]
    fn e_plus_is_projector() {
        let d = OperatorSum::e_plus(1, 0).to_dense().unwrap();
        assert_eq!(d[(0, 0)], c(1., 0.));
        assert_eq!(d[(1, 1)], c(0., 0.));
    }

    #[test]
    fn hadamard_operator_dense_form() {
        let h = op(1, &[("X", FRAC_1_SQRT_2), ("Z", FRAC_1_SQRT_2)]).to_dense().unwrap();
        let expect = DenseMatrix::from_rows(&[
            vec![c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)],
            vec![c(FRAC_1_SQRT_2, 0.), c(-FRAC_1_SQRT_2, 0.)],
        ]);
        assert!(h.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn x_on_first_of_three_is_x_kron_identity() {
        let d = OperatorSum::single(3, 0, Pauli::X).to_dense().unwrap();
        let x = op(1, &[("X", 1.0)]).to_dense().unwrap();
        let expect = x.kron(&DenseMatrix::identity(4));
        assert!(d.approx_eq(&expect, 0.0 + 1e-15));
        assert_eq!(d.dim(), 8);
    }

    #[test]
    fn exp_pauli_special_angles() {
        let zz: PauliString = "ZZ".parse().unwrap();
        let e0 = exp_pauli(&zz, 0.0).to_dense().unwrap();
        assert!(e0.approx_eq(&DenseMatrix::identity(4), 1e-15));
        let e = exp_pauli(&zz, FRAC_PI_2);
        assert!(e.coefficient("II").norm() < 1e-15);
        assert!((e.coefficient("ZZ") - c(0., -1.)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        // Tr_a[X1 E+a] = X1
        let x1 = OperatorSum::single(3, 0, Pauli::X);
        let rho = &x1 * &OperatorSum::e_plus(3, 2);
        let t = rho.partial_trace(&[2]).unwrap();
        assert!(t.dense_distance(&op(2, &[("XI", 1.0)])).unwrap() < 1e-15);
        // traceless ancilla factor
        let t = op(3, &[("XIX", 1.0)]).partial_trace(&[2]).unwrap();
        assert!(t.is_empty());
        // everything traced leaves a scalar
        let t = OperatorSum::identity(2).partial_trace(&[0, 1]).unwrap();
        assert_eq!(t.nspins(), 0);
        assert_eq!(t.trace(), c(4.0, 0.0));
        assert!(op(2, &[("XI", 1.0)]).partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_of_rotated_projector() {
        // Tr_a[ZZ E_phi^a] = ZZ for any phi
        for phi in [0.0, 0.4, 2.2] {
            let e_phi = op(3, &[("III", 0.5), ("IIZ", 0.5 * f64::cos(phi)), ("IIY", -0.5 * f64::sin(phi))]);
            let rho = &op(3, &[("ZZI", 1.0)]) * &e_phi;
            let t = rho.partial_trace(&[2]).unwrap();
            assert!(t.dense_distance(&op(2, &[("ZZ", 1.0)])).unwrap() < 1e-14);
        }
    }

    #[test]
    fn coherence_orders() {
        let comps = op(1, &[("Z", 1.0)]).coherence_decompose();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].order, 0);

        let comps = op(1, &[("X", 1.0)]).coherence_decompose();
        let orders: Vec<i32> = comps.iter().map(|c| c.order).collect();
        assert_eq!(orders, vec![-1, 1]);
        // s+ = (X + iY)/2
        let plus = &comps[1].operator;
        assert!((plus.coefficient("X") - c(0.5, 0.)).norm() < 1e-15);
        assert!((plus.coefficient("Y") - c(0., 0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_quantum_part_of_xx() {
        let comps = op(2, &[("XX", 1.0)]).coherence_decompose();
        let orders: Vec<i32> = comps.iter().map(|c| c.order).collect();
        assert_eq!(orders, vec![-2, 0, 2]);
        let zq = &comps[1].operator;
        let expect = op(2, &[("XX", 0.5), ("YY", 0.5)]);
        assert!(zq.dense_distance(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn dense_round_trip() {
        let a = OperatorSum::from_terms(3, &[("XYZ", c(0.3, -0.2)), ("IIZ", c(1.0, 0.0)), ("YYI", c(0.0, 0.7))]).unwrap();
        let b = OperatorSum::from_dense(&a.to_dense().unwrap());
        assert!(a.dense_distance(&b).unwrap() < 1e-14);
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let a = OperatorSum::from_terms(2, &[("ZX", c(0.5, 0.0)), ("II", c(0.0, -1.0))]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"labels\":\"ZX\""));
        let b: OperatorSum = serde_json::from_str(&s).unwrap();
        assert!(a.dense_distance(&b).unwrap() < 1e-15);
    }

    #[test]
    fn pruning_drops_cancelled_terms() {
        let a = op(1, &[("X", 1.0)]);
        let b = &a - &a;
        assert!(b.is_empty());
        let tiny = op(1, &[("X", 1e-15)]);
        assert!(tiny.is_empty());
        let kept = op(1, &[("X", 1e-15)]);
        assert!(kept.with_prune_threshold(1e-20).is_empty());
        let mut loose = OperatorSum::zero(1).with_prune_threshold(1e-20);
        loose.add_term(vec![Pauli::X], c(1e-15, 0.));
        assert_eq!(loose.len(), 1);
    }
}
