//! Ideal pulse sequences: hard selective rotations, delays under the internal (or an
//! idealized coupling) Hamiltonian, crusher gradients and acquisition.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::acquire::{acquire_dense, AcquireParams, Fid};
use super::system::SpinSystem;
use crate::circuit::{gate_unitary, Axis, Gate};
use crate::codes::{build_code, run_pipeline, zz_error, CodeName};
use crate::dense::{equal_up_to_global_phase, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::OperatorSum;
use crate::pauli::{Pauli, PauliString};

/// Data spin 1, data spin 2, ancilla.
const S1: usize = 0;
const S2: usize = 1;
const SA: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayHamiltonian {
    Full,
    /// Only `(pi/2) J_kl Z_k Z_l`.
    IdealCoupling(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PulseEvent {
    /// Zero-duration rotation `exp(-i angle/2 sum_k sigma_axis^k)`.
    Pulse { spins: Vec<usize>, axis: Axis, angle: f64 },
    Delay { duration: f64, hamiltonian: DelayHamiltonian },
    /// Keeps coherence order zero only.
    Crusher,
    Acquire(AcquireParams),
}

impl PulseEvent {
    fn validate(&self, nspins: usize) -> Result<()> {
        let check = |k: usize| {
            if k >= nspins {
                Err(Error::IndexOutOfRange { index: k, nspins })
            } else {
                Ok(())
            }
        };
        match self {
            PulseEvent::Pulse { spins, axis, angle } => {
                Gate::rot(spins, *axis, *angle).validate(nspins)?;
            }
            PulseEvent::Delay { duration, hamiltonian } => {
                if !(*duration >= 0.0) {
                    return Err(Error::InvalidArgument(format!("delay must be non-negative, got {duration}")));
                }
                if let DelayHamiltonian::IdealCoupling(k, l) = hamiltonian {
                    check(*k)?;
                    check(*l)?;
                    if k == l {
                        return Err(Error::RepeatedIndex);
                    }
                }
            }
            PulseEvent::Crusher => {}
            PulseEvent::Acquire(p) => p.validate(nspins)?,
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    nspins: usize,
    events: Vec<PulseEvent>,
}

#[derive(Clone, Debug)]
pub struct SequenceOutput {
    pub state: OperatorSum,
    pub fids: Vec<Fid>,
}

impl PulseSequence {
    pub fn new(nspins: usize) -> Self {
        Self {
            nspins,
            events: Vec::new(),
        }
    }

    pub fn from_events(nspins: usize, events: Vec<PulseEvent>) -> Result<Self> {
        let mut s = Self::new(nspins);
        for e in events {
            s.push(e)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, e: PulseEvent) -> Result<()> {
        e.validate(self.nspins)?;
        self.events.push(e);
        Ok(())
    }

    pub fn nspins(&self) -> usize {
        self.nspins
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub fn then(&self, other: &PulseSequence) -> Result<PulseSequence> {
        if other.nspins != self.nspins {
            return Err(Error::SpinMismatch {
                left: self.nspins,
                right: other.nspins,
            });
        }
        let mut s = self.clone();
        s.events.extend(other.events.iter().cloned());
        Ok(s)
    }

    /// Total delay time.
    pub fn duration(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                PulseEvent::Delay { duration, .. } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    /// Net unitary; fails when the sequence contains a crusher or an acquisition.
    pub fn propagator(&self, sys: &SpinSystem) -> Result<DenseMatrix> {
        check_system(sys, self.nspins)?;
        let mut u = DenseMatrix::identity(1 << self.nspins);
        for e in &self.events {
            let step = match e {
                PulseEvent::Pulse { spins, axis, angle } => gate_unitary(&Gate::rot(spins, *axis, *angle), self.nspins)?,
                PulseEvent::Delay { duration, hamiltonian } => delay_propagator(sys, *duration, *hamiltonian),
                PulseEvent::Crusher | PulseEvent::Acquire(_) => {
                    return Err(Error::InvalidArgument("sequence is not unitary: it contains a crusher or acquisition".into()))
                }
            };
            u = step.matmul(&u);
        }
        Ok(u)
    }

    /// Apply every event to a dense density operator; acquisitions record FIDs and leave the state alone.
    pub fn run_dense(&self, sys: &SpinSystem, rho: &DenseMatrix) -> Result<(DenseMatrix, Vec<Fid>)> {
        check_system(sys, self.nspins)?;
        if rho.dim() != 1 << self.nspins {
            return Err(Error::DimensionMismatch {
                left: 1 << self.nspins,
                right: rho.dim(),
            });
        }
        let mut rho = rho.clone();
        let mut fids = Vec::new();
        for e in &self.events {
            match e {
                PulseEvent::Pulse { spins, axis, angle } => {
                    rho = rho.conjugated_by(&gate_unitary(&Gate::rot(spins, *axis, *angle), self.nspins)?);
                }
                PulseEvent::Delay { duration, hamiltonian } => {
                    let e = delay_energies(sys, *hamiltonian);
                    rho = evolve_diagonal(&rho, &e, *duration);
                }
                PulseEvent::Crusher => rho = OperatorSum::from_dense(&rho).zero_quantum().to_dense()?,
                PulseEvent::Acquire(p) => fids.push(acquire_dense(&rho, sys, p)?),
            }
        }
        Ok((rho, fids))
    }

    pub fn run(&self, sys: &SpinSystem, rho: &OperatorSum) -> Result<SequenceOutput> {
        let (state, fids) = self.run_dense(sys, &rho.to_dense()?)?;
        Ok(SequenceOutput {
            state: OperatorSum::from_dense(&state),
            fids,
        })
    }
}

fn check_system(sys: &SpinSystem, nspins: usize) -> Result<()> {
    if sys.nspins() != nspins {
        return Err(Error::SpinMismatch {
            left: nspins,
            right: sys.nspins(),
        });
    }
    Ok(())
}

fn delay_energies(sys: &SpinSystem, which: DelayHamiltonian) -> Vec<f64> {
    match which {
        DelayHamiltonian::Full => sys.hamiltonian_diagonal(&[]),
        DelayHamiltonian::IdealCoupling(k, l) => {
            let n = sys.nspins();
            let j = sys.j(k, l);
            (0..1usize << n)
                .map(|i| {
                    let parity = (i >> (n - 1 - k) ^ i >> (n - 1 - l)) & 1;
                    let zz = if parity == 0 { 1.0 } else { -1.0 };
                    0.5 * PI * j * zz
                })
                .collect()
        }
    }
}

/// `rho_ij -> rho_ij exp(-i (E_i - E_j) t)`
fn evolve_diagonal(rho: &DenseMatrix, energies: &[f64], t: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rho.dim(), |i, j| rho[(i, j)] * Complex64::from_polar(1.0, -(energies[i] - energies[j]) * t))
}

/// `exp(-i H t)`; diagonal because every internal term is z-type.
pub fn delay_propagator(sys: &SpinSystem, t: f64, which: DelayHamiltonian) -> DenseMatrix {
    let d: Vec<Complex64> = delay_energies(sys, which)
        .iter()
        .map(|e| Complex64::from_polar(1.0, -e * t))
        .collect();
    DenseMatrix::from_diagonal(&d)
}

pub fn evolve_delay(rho: &OperatorSum, sys: &SpinSystem, t: f64, which: DelayHamiltonian) -> Result<OperatorSum> {
    check_system(sys, rho.nspins())?;
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("delay must be non-negative, got {t}")));
    }
    let e = delay_energies(sys, which);
    Ok(OperatorSum::from_dense(&evolve_diagonal(&rho.to_dense()?, &e, t)))
}

pub fn apply_crusher(rho: &OperatorSum) -> OperatorSum {
    rho.zero_quantum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Sx1,
    Sx1Sz2,
}

impl InitialState {
    pub const ALL: [InitialState; 2] = [InitialState::Sx1, InitialState::Sx1Sz2];

    pub fn as_str(self) -> &'static str {
        match self {
            InitialState::Sx1 => "sx1",
            InitialState::Sx1Sz2 => "sx1sz2",
        }
    }

    /// The data operator the preparation aims for.
    pub fn data_operator(self) -> OperatorSum {
        let label = match self {
            InitialState::Sx1 => "XI",
            InitialState::Sx1Sz2 => "XZ",
        };
        OperatorSum::from_pauli(&label.parse().expect("static label"))
    }
}

impl FromStr for InitialState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sx1" => Ok(InitialState::Sx1),
            "sx1sz2" => Ok(InitialState::Sx1Sz2),
            _ => Err(Error::InvalidArgument(format!("unknown initial state `{s}`"))),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn pulse(spins: &[usize], axis: Axis, angle: f64) -> PulseEvent {
    PulseEvent::Pulse {
        spins: spins.to_vec(),
        axis,
        angle,
    }
}

/// Delay of `1 / (2 J_kl)` under the coupling alone: `exp(-i pi/4 Z_k Z_l)`.
fn coupling_delay(sys: &SpinSystem, k: usize, l: usize) -> PulseEvent {
    PulseEvent::Delay {
        duration: 1.0 / (2.0 * sys.j(k, l)),
        hamiltonian: DelayHamiltonian::IdealCoupling(k, l),
    }
}

fn require_three_coupled(sys: &SpinSystem) -> Result<()> {
    check_system(sys, 3)?;
    if sys.j(S1, S2) == 0.0 || sys.j(S1, SA) == 0.0 {
        return Err(Error::InvalidArgument("spin 1 must couple to spin 2 and to the ancilla".into()));
    }
    Ok(())
}

/// Thermal deviation `1/2 (Z1 + Z2 + Za)`.
pub fn thermal_equilibrium(nspins: usize) -> OperatorSum {
    let mut rho = OperatorSum::zero(nspins);
    for k in 0..nspins {
        rho.add_term(PauliString::z_on(nspins, &[k]).labels().to_vec(), Complex64::new(0.5, 0.0));
    }
    rho
}

/// Preparation after spin 2 has been saturated: from `1/2 (Z1 + Za)` to `X1 (1 + Za)/2`
/// or `X1 Z2 (1 + Za)/2`.
pub fn preparation_sequence(sys: &SpinSystem, which: InitialState) -> Result<PulseSequence> {
    require_three_coupled(sys)?;
    let mut ev = vec![
        pulse(&[SA], Axis::NegX, FRAC_PI_2),
        coupling_delay(sys, S1, SA),
        pulse(&[SA], Axis::Y, FRAC_PI_2),
    ];
    match which {
        InitialState::Sx1 => ev.push(pulse(&[S1], Axis::Y, FRAC_PI_2)),
        InitialState::Sx1Sz2 => {
            ev.push(pulse(&[S1], Axis::X, FRAC_PI_2));
            ev.push(coupling_delay(sys, S1, S2));
        }
    }
    PulseSequence::from_events(3, ev)
}

/// Thermal state, `(pi/2)_x` on spin 2, crusher, then [`preparation_sequence`].
pub fn prepare_initial(sys: &SpinSystem, which: InitialState) -> Result<OperatorSum> {
    let mut seq = PulseSequence::from_events(3, vec![pulse(&[S2], Axis::X, FRAC_PI_2), PulseEvent::Crusher])?;
    seq = seq.then(&preparation_sequence(sys, which)?)?;
    Ok(seq.run(sys, &thermal_equilibrium(3))?.state)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeSequences {
    pub encode: PulseSequence,
    pub decode: PulseSequence,
    pub correct: PulseSequence,
}

/// Pulse-level encoder, decoder and correction for the two-data-spin code.
///
/// The decoder places the refocusing pi pulse after the coupling delays; with it first,
/// as printed, decode-after-encode leaves `-X2 Xa` instead of the identity.
pub fn code_sequences(sys: &SpinSystem) -> Result<CodeSequences> {
    require_three_coupled(sys)?;
    let encode = PulseSequence::from_events(
        3,
        vec![
            pulse(&[S2, SA], Axis::X, FRAC_PI_2),
            pulse(&[S2, SA], Axis::Y, FRAC_PI_2),
            coupling_delay(sys, S1, S2),
            coupling_delay(sys, S1, SA),
            pulse(&[S1], Axis::Y, FRAC_PI_2),
            pulse(&[S2, SA], Axis::X, PI),
        ],
    )?;
    let decode = PulseSequence::from_events(
        3,
        vec![
            pulse(&[S1], Axis::NegY, FRAC_PI_2),
            coupling_delay(sys, S1, S2),
            coupling_delay(sys, S1, SA),
            pulse(&[S2, SA], Axis::X, PI),
            pulse(&[S2, SA], Axis::NegY, FRAC_PI_2),
            pulse(&[S2, SA], Axis::NegX, FRAC_PI_2),
        ],
    )?;
    let correct = PulseSequence::from_events(
        3,
        vec![
            pulse(&[S1], Axis::NegY, FRAC_PI_2),
            coupling_delay(sys, S1, SA),
            pulse(&[S1], Axis::Y, FRAC_PI_2),
            pulse(&[S1], Axis::NegX, FRAC_PI_2),
        ],
    )?;
    Ok(CodeSequences { encode, decode, correct })
}

/// The decoding sequence in its printed order (pi pulse first). Kept for reporting.
pub fn printed_decode_sequence(sys: &SpinSystem) -> Result<PulseSequence> {
    require_three_coupled(sys)?;
    PulseSequence::from_events(
        3,
        vec![
            pulse(&[S2, SA], Axis::X, PI),
            pulse(&[S1], Axis::NegY, FRAC_PI_2),
            coupling_delay(sys, S1, S2),
            coupling_delay(sys, S1, SA),
            pulse(&[S2, SA], Axis::NegY, FRAC_PI_2),
            pulse(&[S2, SA], Axis::NegX, FRAC_PI_2),
        ],
    )
}

/// Spin-echo sequence of total delay `tau` that keeps only the spin 1-2 coupling.
pub fn refocused_zz(tau: f64) -> Result<PulseSequence> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be non-negative, got {tau}")));
    }
    let d = |f: f64| PulseEvent::Delay {
        duration: tau * f,
        hamiltonian: DelayHamiltonian::Full,
    };
    let all = [S1, S2, SA];
    PulseSequence::from_events(
        3,
        vec![
            d(0.125),
            pulse(&[SA], Axis::Y, PI),
            d(0.125),
            pulse(&all, Axis::Y, PI),
            d(0.125),
            pulse(&[SA], Axis::NegY, PI),
            d(0.25),
            pulse(&[SA], Axis::Y, PI),
            d(0.125),
            pulse(&all, Axis::NegY, PI),
            d(0.125),
            pulse(&[SA], Axis::NegY, PI),
            d(0.125),
        ],
    )
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZzFit {
    /// `theta` in `U = e^{i gamma} exp(-i theta Z_k Z_l)`.
    pub theta: f64,
    pub global_phase: f64,
    /// Max-abs residual of the fit.
    pub deviation: f64,
}

/// Fit a unitary to a pure `Z_k Z_l` exponential, up to global phase.
pub fn fit_zz_exponential(u: &DenseMatrix, k: usize, l: usize) -> Result<ZzFit> {
    let n = u.nspins();
    let zz = OperatorSum::from_pauli(&PauliString::z_on(n, &[k, l])).to_dense()?;
    let diag = u.diagonal();
    let dz = zz.diagonal();
    // exp(-i theta ZZ) has entries e^{-i theta} on the +1 block and e^{i theta} on the -1 block
    let plus: Complex64 = diag.iter().zip(&dz).filter(|(_, z)| z.re > 0.0).map(|(d, _)| d).sum();
    let minus: Complex64 = diag.iter().zip(&dz).filter(|(_, z)| z.re < 0.0).map(|(d, _)| d).sum();
    let theta = 0.5 * (minus / plus).arg();
    let target = OperatorSum::from_pauli(&PauliString::z_on(n, &[k, l]));
    let model = crate::operator::exp_pauli(&target.pauli_strings()[0], theta).to_dense()?;
    let m = equal_up_to_global_phase(u, &model, f64::INFINITY);
    Ok(ZzFit {
        theta,
        global_phase: m.phase,
        deviation: m.max_deviation,
    })
}

/// `max |W - I_data (x) A|` for `W = v^dagger u` with `A` the best ancilla-only factor:
/// zero when `u` and `v` differ only by a unitary on the ancilla (the last spin).
pub fn ancilla_factor_deviation(u: &DenseMatrix, v: &DenseMatrix) -> f64 {
    let w = v.adjoint().matmul(u);
    let n = w.nspins();
    let data: Vec<usize> = (0..n - 1).collect();
    let a = w.partial_trace(&data).scale(Complex64::new(1.0 / (1u64 << (n - 1)) as f64, 0.0));
    DenseMatrix::identity(1 << (n - 1)).kron(&a).max_abs_diff(&w)
}

#[derive(Clone, Debug, Serialize)]
pub struct PulseGateReport {
    pub phis: Vec<f64>,
    pub inputs: usize,
    /// Max deviation of the data-reduced outputs of the pulse and gate pipelines.
    pub max_deviation: f64,
    pub encode_global_phase: f64,
    pub encode_deviation: f64,
    pub correct_ancilla_factor_deviation: f64,
    pub decode_roundtrip_deviation: f64,
    pub printed_decode_roundtrip_deviation: f64,
}

/// Run the pulse-level pipeline on every `B_i E+` input and compare with the gate level.
pub fn compare_with_gates(sys: &SpinSystem, phis: &[f64]) -> Result<PulseGateReport> {
    let seqs = code_sequences(sys)?;
    let enc = seqs.encode.propagator(sys)?;
    let dec = seqs.decode.propagator(sys)?;
    let cor = seqs.correct.propagator(sys)?;
    let code = build_code(CodeName::Fig1);
    let e_plus = OperatorSum::e_plus(1, 0);
    let mut max_dev: f64 = 0.0;
    for &phi in phis {
        let err = zz_error(3, S1, S2, phi);
        for a in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            for b in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                let data = OperatorSum::from_pauli(&PauliString::new(vec![a, b])?);
                let gate = run_pipeline(&code, &data, &e_plus, &err)?.data_state.to_dense()?;
                let rho = data.kron(&e_plus).to_dense()?;
                let out = rho.conjugated_by(&enc).conjugated_by(&err).conjugated_by(&dec).conjugated_by(&cor);
                max_dev = max_dev.max(out.partial_trace(&[SA]).max_abs_diff(&gate));
            }
        }
    }
    let enc_match = equal_up_to_global_phase(&enc, &code.encoder_unitary(), f64::INFINITY);
    let id = DenseMatrix::identity(8);
    let roundtrip = |d: &DenseMatrix| equal_up_to_global_phase(&d.matmul(&enc), &id, f64::INFINITY).max_deviation;
    Ok(PulseGateReport {
        phis: phis.to_vec(),
        inputs: 16,
        max_deviation: max_dev,
        encode_global_phase: enc_match.phase,
        encode_deviation: enc_match.max_deviation,
        correct_ancilla_factor_deviation: ancilla_factor_deviation(&cor, &code.correction_unitary()),
        decode_roundtrip_deviation: roundtrip(&dec),
        printed_decode_roundtrip_deviation: roundtrip(&printed_decode_sequence(sys)?.propagator(sys)?),
    })
}
