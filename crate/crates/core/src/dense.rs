//! Dense `2^N x 2^N` complex matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for operator equality (max-abs entry difference).
pub const OPERATOR_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major square complex matrix whose dimension is a power of two.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension {dim} is not a power of two");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |r, c| rows[r][c])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// `|psi><psi|`
    pub fn outer(psi: &[Complex64]) -> Self {
        Self::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nspins(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let d = self.dim * other.dim;
        DenseMatrix::from_fn(d, |r, c| {
            self[(r / other.dim, c / other.dim)] * other[(r % other.dim, c % other.dim)]
        })
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        DenseMatrix { dim: n, data: out }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length differs from dimension");
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `U * self * U^dagger`
    pub fn conjugated_by(&self, u: &DenseMatrix) -> DenseMatrix {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U U^dagger - I|`
    pub fn unitarity_deviation(&self) -> f64 {
        self.matmul(&self.adjoint())
            .max_abs_diff(&DenseMatrix::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn approx_eq(&self, other: &DenseMatrix, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) < tol
    }

    /// Trace out the listed spins (spin 0 = MSB); kept spins stay in order.
    pub fn partial_trace(&self, traced: &[usize]) -> DenseMatrix {
        let n = self.nspins();
        let kept: Vec<usize> = (0..n).filter(|k| !traced.contains(k)).collect();
        let tr: Vec<usize> = (0..n).filter(|k| traced.contains(k)).collect();
        let bit = |k: usize| 1usize << (n - 1 - k);
        let spread = |idx: usize, spins: &[usize]| -> usize {
            let m = spins.len();
            spins
                .iter()
                .enumerate()
                .filter(|(j, _)| idx >> (m - 1 - j) & 1 == 1)
                .map(|(_, &k)| bit(k))
                .sum()
        };
        let dk = 1usize << kept.len();
        let dt = 1usize << tr.len();
        let kept_idx: Vec<usize> = (0..dk).map(|i| spread(i, &kept)).collect();
        let tr_idx: Vec<usize> = (0..dt).map(|i| spread(i, &tr)).collect();
        DenseMatrix::from_fn(dk, |r, c| {
            tr_idx
                .iter()
                .map(|t| self[(kept_idx[r] | t, kept_idx[c] | t)])
                .sum()
        })
    }

    pub fn check_same_dim(&self, other: &DenseMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs)
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of a global-phase-insensitive comparison `U = e^{i phase} V`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatch {
    pub equal: bool,
    pub phase: f64,
    pub max_deviation: f64,
}

/// Decide whether `u = e^{i gamma} v` for some real `gamma`.
pub fn equal_up_to_global_phase(u: &DenseMatrix, v: &DenseMatrix, tol: f64) -> PhaseMatch {
    if u.dim() != v.dim() {
        return PhaseMatch {
            equal: false,
            phase: 0.0,
            max_deviation: f64::INFINITY,
        };
    }
    // Reference phase from the largest entry of v.
    let (idx, _) = v
        .data
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let vref = v.data[idx];
    let phase = if vref.norm() == 0.0 {
        0.0
    } else {
        (u.data[idx] / vref).arg()
    };
    let rotated = v.scale(Complex64::from_polar(1.0, phase));
    let max_deviation = u.max_abs_diff(&rotated);
    PhaseMatch {
        equal: max_deviation < tol,
        phase,
        max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_ordering_puts_first_factor_most_significant() {
        let x = DenseMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        let i2 = DenseMatrix::identity(2);
        let xi = x.kron(&i2);
        // X on the first factor flips the high bit: |00> -> |10>
        assert_eq!(xi[(2, 0)], c(1., 0.));
        assert_eq!(xi[(1, 0)], c(0., 0.));
    }

    #[test]
    fn global_phase_detection() {
        let u = DenseMatrix::from_rows(&[vec![c(0.6, 0.), c(0., 0.8)], vec![c(0., 0.8), c(0.6, 0.)]]);
        let m = equal_up_to_global_phase(&u, &u, OPERATOR_TOL);
        assert!(m.equal);
        assert!(m.phase.abs() < 1e-15);

        let minus_i_u = u.scale(c(0., -1.));
        let m = equal_up_to_global_phase(&minus_i_u, &u, OPERATOR_TOL);
        assert!(m.equal);
        assert!((m.phase + FRAC_PI_2).abs() < 1e-12);

        let other = DenseMatrix::identity(2);
        assert!(!equal_up_to_global_phase(&u, &other, OPERATOR_TOL).equal);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = DenseMatrix::from_rows(&[vec![c(1., 0.), c(2., 0.)], vec![c(3., 0.), c(4., 0.)]]);
        let b = DenseMatrix::from_diagonal(&[c(0.25, 0.), c(0.75, 0.)]);
        let ab = a.kron(&b);
        assert!(ab.partial_trace(&[1]).approx_eq(&a, 1e-15));
        assert!(ab.partial_trace(&[0]).approx_eq(&b.scale(c(5., 0.)), 1e-15));
        let aab = a.kron(&a).kron(&b);
        assert!(aab.partial_trace(&[1]).approx_eq(&a.kron(&b).scale(c(5., 0.)), 1e-14));
        assert_eq!(ab.partial_trace(&[0, 1]).dim(), 1);
    }

    #[test]
    fn unitary_check() {
        assert!(DenseMatrix::identity(8).is_unitary(1e-12));
        assert!(!DenseMatrix::identity(4).scale(c(2., 0.)).is_unitary(1e-3));
    }
}
