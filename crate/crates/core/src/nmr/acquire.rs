//! Decoupled detection of transverse magnetization.

use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::system::SpinSystem;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::operator::OperatorSum;

pub const DEFAULT_NPOINTS: usize = 1024;
pub const DEFAULT_DWELL: f64 = 1e-3;
pub const DEFAULT_ZERO_FILL: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcquireParams {
    pub observe: Vec<usize>,
    /// Every Hamiltonian term touching these spins is removed during detection.
    pub decouple: Vec<usize>,
    pub npoints: usize,
    pub dwell: f64,
    /// Multiply each observed spin's signal by `exp(-t / T2)` when its T2 is known.
    pub apodize_t2: bool,
}

impl AcquireParams {
    /// Observe spin 1 with the ancilla (last spin) decoupled.
    pub fn data_spin_one(nspins: usize) -> Self {
        Self {
            observe: vec![0],
            decouple: vec![nspins - 1],
            npoints: DEFAULT_NPOINTS,
            dwell: DEFAULT_DWELL,
            apodize_t2: true,
        }
    }

    pub fn validate(&self, nspins: usize) -> Result<()> {
        for &k in self.observe.iter().chain(&self.decouple) {
            if k >= nspins {
                return Err(Error::IndexOutOfRange { index: k, nspins });
            }
        }
        if self.observe.iter().any(|k| self.decouple.contains(k)) {
            return Err(Error::InvalidArgument("a spin cannot be both observed and decoupled".into()));
        }
        if self.npoints == 0 || !(self.dwell > 0.0) {
            return Err(Error::InvalidArgument("acquisition needs npoints > 0 and dwell > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fid {
    pub samples: Vec<Complex64>,
    pub dwell: f64,
}

/// A one-dimensional spectrum, frequencies ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum1D {
    pub freqs_hz: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Frequencies of an fft-shifted transform of length `n` at sampling interval `dt`.
pub fn shifted_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let half = (n / 2) as isize;
    (0..n as isize).map(|k| (k - half) as f64 / (n as f64 * dt)).collect()
}

/// Zero-filled forward FFT with the first point halved, output fft-shifted.
pub fn shifted_fft(samples: &[Complex64], zero_fill: usize) -> Vec<Complex64> {
    let n = zero_fill.max(samples.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..samples.len()].copy_from_slice(samples);
    if let Some(first) = buf.first_mut() {
        *first *= 0.5;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.rotate_right(n / 2);
    buf
}

impl Fid {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|n| n as f64 * self.dwell).collect()
    }

    pub fn spectrum(&self, zero_fill: usize) -> Spectrum1D {
        let values = shifted_fft(&self.samples, zero_fill);
        Spectrum1D {
            freqs_hz: shifted_frequencies(values.len(), self.dwell),
            values,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,re,im\n");
        for (t, z) in self.times().iter().zip(&self.samples) {
            let _ = writeln!(s, "{t},{},{}", z.re, z.im);
        }
        s
    }
}

/// `s(t) = Tr[rho(t) sum_k sigma+^k] / 2^(N-1)`; `rho(t)` evolves under the internal
/// Hamiltonian without the decoupled spins' terms.
pub fn acquire_dense(rho: &DenseMatrix, sys: &SpinSystem, p: &AcquireParams) -> Result<Fid> {
    let n = sys.nspins();
    p.validate(n)?;
    if rho.dim() != 1 << n {
        return Err(Error::DimensionMismatch {
            left: 1 << n,
            right: rho.dim(),
        });
    }
    let energies = sys.hamiltonian_diagonal(&p.decouple);
    let norm = 1.0 / (1u64 << (n - 1)) as f64;
    let mut samples = vec![Complex64::new(0.0, 0.0); p.npoints];
    for &k in &p.observe {
        let bit = 1usize << (n - 1 - k);
        // sigma+ = |0><1|: Tr[rho sigma+] picks rho_ij with i = j + bit
        let lines: Vec<(Complex64, f64)> = (0..rho.dim())
            .filter(|j| j & bit == 0)
            .map(|j| (rho[(j | bit, j)], energies[j | bit] - energies[j]))
            .filter(|(a, _)| a.norm() > 0.0)
            .collect();
        let r2 = match (p.apodize_t2, sys.t2_s[k]) {
            (true, Some(t2)) if t2 > 0.0 => 1.0 / t2,
            _ => 0.0,
        };
        for (m, s) in samples.iter_mut().enumerate() {
            let t = m as f64 * p.dwell;
            let sum: Complex64 = lines.iter().map(|(a, w)| a * Complex64::from_polar(1.0, -w * t)).sum();
            *s += sum * (norm * (-r2 * t).exp());
        }
    }
    Ok(Fid {
        samples,
        dwell: p.dwell,
    })
}

pub fn acquire(rho: &OperatorSum, sys: &SpinSystem, p: &AcquireParams) -> Result<Fid> {
    acquire_dense(&rho.to_dense()?, sys, p)
}
