//! Independent oracles built on nalgebra: explicit Kronecker products of 2x2 Pauli
//! matrices, eigendecomposition-based exponentials and index-level partial traces.
#![allow(dead_code)]

use coherent_codes::DenseMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(ch: char) -> M {
    let (o, z, i) = (c(1., 0.), c(0., 0.), c(0., 1.));
    match ch {
        'I' => M::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => M::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => M::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => M::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad label {ch}"),
    }
}

/// Leftmost label is the most significant tensor factor.
pub fn op(labels: &str) -> M {
    labels.chars().fold(M::identity(1, 1), |acc, ch| acc.kronecker(&pauli(ch)))
}

pub fn sum(terms: &[(&str, f64)]) -> M {
    let n = terms[0].0.len();
    terms
        .iter()
        .fold(M::zeros(1 << n, 1 << n), |acc, (l, w)| acc + op(l) * c(*w, 0.0))
}

pub fn to_na(m: &DenseMatrix) -> M {
    M::from_row_slice(m.dim(), m.dim(), m.data())
}

pub fn from_na(m: &M) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dense_vs_na(a: &DenseMatrix, b: &M) -> f64 {
    max_diff(&to_na(a), b)
}

/// `exp(-i t H)` for Hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &M, t: f64) -> M {
    let eig = h.clone().symmetric_eigen();
    let d = M::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Partial trace over the listed spins by explicit index summation.
pub fn ptrace(m: &M, nspins: usize, traced: &[usize]) -> M {
    let kept: Vec<usize> = (0..nspins).filter(|k| !traced.contains(k)).collect();
    let dk = 1 << kept.len();
    let mut out = M::zeros(dk, dk);
    let bit = |x: usize, k: usize| (x >> (nspins - 1 - k)) & 1;
    for i in 0..1usize << nspins {
        for j in 0..1usize << nspins {
            if traced.iter().any(|&k| bit(i, k) != bit(j, k)) {
                continue;
            }
            let ri = kept.iter().fold(0, |a, &k| (a << 1) | bit(i, k));
            let rj = kept.iter().fold(0, |a, &k| (a << 1) | bit(j, k));
            out[(ri, rj)] += m[(i, j)];
        }
    }
    out
}

pub fn e_plus() -> M {
    sum(&[("I", 0.5), ("Z", 0.5)])
}

pub fn conj(u: &M, rho: &M) -> M {
    u * rho * u.adjoint()
}

/// Explicit CNOT by basis permutation.
pub fn cnot(n: usize, control: usize, target: usize) -> M {
    let dim = 1 << n;
    let mut u = M::zeros(dim, dim);
    for x in 0..dim {
        let y = if x >> (n - 1 - control) & 1 == 1 { x ^ (1 << (n - 1 - target)) } else { x };
        u[(y, x)] = c(1., 0.);
    }
    u
}

pub fn hadamard(n: usize, k: usize) -> M {
    let h = (pauli('X') + pauli('Z')) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    (0..n).fold(M::identity(1, 1), |acc, q| acc.kronecker(&if q == k { h.clone() } else { pauli('I') }))
}
