//! Gate-level circuits and their exact unitaries.
//!
//! Gates act on 0-based spin indices internally; the JSON records use the
//! 1-based spin labels (ancilla last).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{equal_up_to_global_phase, DenseMatrix, PhaseMatch, OPERATOR_TOL};
use crate::error::{Error, Result};
use crate::operator::OperatorSum;
use crate::pauli::{PauliString, MAX_SPINS};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Rotation axis. `Phase(phi)` is the transverse axis `cos(phi) X + sin(phi) Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    X,
    Y,
    Z,
    NegX,
    NegY,
    Phase(f64),
}

impl Axis {
    /// Transverse phase angle, or `None` for the z axis.
    pub fn phase(self) -> Option<f64> {
        match self {
            Axis::X => Some(0.0),
            Axis::Y => Some(FRAC_PI_2),
            Axis::NegX => Some(PI),
            Axis::NegY => Some(-FRAC_PI_2),
            Axis::Phase(p) => Some(p),
            Axis::Z => None,
        }
    }

    /// `exp(-i theta/2 sigma_axis)` as a 2x2 row-major matrix.
    pub fn rotation(self, theta: f64) -> [Complex64; 4] {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match self.phase() {
            None => [
                Complex64::new(c, -s),
                ZERO,
                ZERO,
                Complex64::new(c, s),
            ],
            Some(phi) => {
                // -i s (cos phi X + sin phi Y): off-diagonals -i s e^{-i phi}, -i s e^{i phi}
                let e = Complex64::from_polar(1.0, phi);
                let mis = Complex64::new(0.0, -s);
                [Complex64::new(c, 0.0), mis * e.conj(), mis * e, Complex64::new(c, 0.0)]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    CNot { control: usize, target: usize },
    /// `exp(-i angle/2 sum_k sigma_axis^k)`
    Rotation { spins: Vec<usize>, axis: Axis, angle: f64 },
    Toffoli { c1: usize, c2: usize, target: usize },
    /// `exp(-i theta P)`
    PauliExp { pauli: PauliString, theta: f64 },
}

impl Gate {
    pub fn rot(spins: &[usize], axis: Axis, angle: f64) -> Gate {
        Gate::Rotation {
            spins: spins.to_vec(),
            axis,
            angle,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::CNot { control, target }
    }

    pub fn spins(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) => vec![*q],
            Gate::CNot { control, target } => vec![*control, *target],
            Gate::Rotation { spins, .. } => spins.clone(),
            Gate::Toffoli { c1, c2, target } => vec![*c1, *c2, *target],
            Gate::PauliExp { pauli, .. } => (0..pauli.nspins()).collect(),
        }
    }

    pub fn validate(&self, nspins: usize) -> Result<()> {
        if let Gate::PauliExp { pauli, .. } = self {
            if pauli.nspins() != nspins {
                return Err(Error::SpinMismatch {
                    left: nspins,
                    right: pauli.nspins(),
                });
            }
            if !pauli.phase().is_real() {
                return Err(Error::InvalidArgument("pauli exponent must be Hermitian".into()));
            }
            return Ok(());
        }
        let spins = self.spins();
        if spins.is_empty() {
            return Err(Error::InvalidArgument("gate acts on no spins".into()));
        }
        for (i, &k) in spins.iter().enumerate() {
            if k >= nspins {
                return Err(Error::IndexOutOfRange { index: k, nspins });
            }
            if spins[..i].contains(&k) {
                return Err(Error::RepeatedIndex);
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Rotation { spins, axis, angle } => Gate::Rotation {
                spins: spins.clone(),
                axis: *axis,
                angle: -angle,
            },
            Gate::PauliExp { pauli, theta } => Gate::PauliExp {
                pauli: pauli.clone(),
                theta: -theta,
            },
            g => g.clone(),
        }
    }

    /// Apply in place to a state vector over `nspins` spins (spin 0 = MSB).
    pub fn apply_state(&self, nspins: usize, psi: &mut [Complex64]) {
        let bit = |k: usize| 1usize << (nspins - 1 - k);
        match self {
            Gate::Hadamard(q) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                apply_single(psi, bit(*q), [h, h, h, -h]);
            }
            Gate::CNot { control, target } => {
                let (cb, tb) = (bit(*control), bit(*target));
                for i in 0..psi.len() {
                    if i & cb != 0 && i & tb == 0 {
                        psi.swap(i, i | tb);
                    }
                }
            }
            Gate::Toffoli { c1, c2, target } => {
                let (b1, b2, tb) = (bit(*c1), bit(*c2), bit(*target));
                for i in 0..psi.len() {
                    if i & b1 != 0 && i & b2 != 0 && i & tb == 0 {
                        psi.swap(i, i | tb);
                    }
                }
            }
            Gate::Rotation { spins, axis, angle } => {
                let m = axis.rotation(*angle);
                for &k in spins {
                    apply_single(psi, bit(k), m);
                }
            }
            Gate::PauliExp { pauli, theta } => {
                let p = pauli.apply(psi);
                let (c, s) = (theta.cos(), theta.sin());
                for (a, b) in psi.iter_mut().zip(p) {
                    *a = *a * c + Complex64::new(0.0, -s) * b;
                }
            }
        }
    }
}

fn apply_single(psi: &mut [Complex64], b: usize, m: [Complex64; 4]) {
    for i in 0..psi.len() {
        if i & b == 0 {
            let (a0, a1) = (psi[i], psi[i | b]);
            psi[i] = m[0] * a0 + m[1] * a1;
            psi[i | b] = m[2] * a0 + m[3] * a1;
        }
    }
}

/// Exact unitary of a single gate on `nspins` spins.
pub fn gate_unitary(g: &Gate, nspins: usize) -> Result<DenseMatrix> {
    let mut c = Circuit::new(nspins)?;
    c.push(g.clone())?;
    Ok(c.unitary())
}

/// Ordered gate list; gate 0 is applied first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    nspins: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(nspins: usize) -> Result<Self> {
        if nspins == 0 || nspins > MAX_SPINS {
            return Err(Error::DimensionOverflow {
                nspins,
                max: MAX_SPINS,
            });
        }
        Ok(Self {
            nspins,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(nspins: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(nspins)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.nspins)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn nspins(&self) -> usize {
        self.nspins
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Reverse order, invert each gate.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            nspins: self.nspins,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.nspins != other.nspins {
            return Err(Error::SpinMismatch {
                left: self.nspins,
                right: other.nspins,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            nspins: self.nspins,
            gates,
        })
    }

    pub fn apply_state(&self, psi: &mut [Complex64]) {
        for g in &self.gates {
            g.apply_state(self.nspins, psi);
        }
    }

    /// Product of gate unitaries, later gates on the left.
    pub fn unitary(&self) -> DenseMatrix {
        let dim = 1usize << self.nspins;
        let mut u = DenseMatrix::zeros(dim);
        let mut col = vec![ZERO; dim];
        for c in 0..dim {
            col.iter_mut().for_each(|z| *z = ZERO);
            col[c] = Complex64::new(1.0, 0.0);
            self.apply_state(&mut col);
            for (r, z) in col.iter().enumerate() {
                u[(r, c)] = *z;
            }
        }
        u
    }

    pub fn to_records(&self) -> Vec<GateRecord> {
        self.gates.iter().map(GateRecord::from_gate).collect()
    }

    pub fn from_records(nspins: usize, records: &[GateRecord]) -> Result<Circuit> {
        let gates = records
            .iter()
            .map(|r| r.to_gate(nspins))
            .collect::<Result<Vec<_>>>()?;
        Circuit::from_gates(nspins, gates)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_records())?)
    }

    pub fn from_json(nspins: usize, s: &str) -> Result<Circuit> {
        let records: Vec<GateRecord> = serde_json::from_str(s)?;
        Circuit::from_records(nspins, &records)
    }
}

pub fn circuit_unitary(c: &Circuit) -> DenseMatrix {
    c.unitary()
}

/// `U rho U^dagger`. With `strict`, a non-unitary `U` is rejected.
pub fn conjugate(op: &OperatorSum, u: &DenseMatrix, strict: bool) -> Result<OperatorSum> {
    let rho = op.to_dense()?;
    rho.check_same_dim(u)?;
    if strict {
        let deviation = u.unitarity_deviation();
        if deviation >= OPERATOR_TOL {
            return Err(Error::NotUnitary { deviation });
        }
    }
    Ok(OperatorSum::from_dense(&rho.conjugated_by(u)))
}

/// JSON gate record; spin indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateRecord {
    H {
        spin: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Rot {
        spins: Vec<usize>,
        /// one of x, y, z, -x, -y, phase
        axis: String,
        angle_rad: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase_rad: Option<f64>,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    PauliExp {
        pauli: String,
        theta_rad: f64,
    },
}

impl GateRecord {
    pub fn from_gate(g: &Gate) -> GateRecord {
        match g {
            Gate::Hadamard(q) => GateRecord::H { spin: q + 1 },
            Gate::CNot { control, target } => GateRecord::Cnot {
                control: control + 1,
                target: target + 1,
            },
            Gate::Rotation { spins, axis, angle } => {
                let (name, phase_rad) = match axis {
                    Axis::X => ("x", None),
                    Axis::Y => ("y", None),
                    Axis::Z => ("z", None),
                    Axis::NegX => ("-x", None),
                    Axis::NegY => ("-y", None),
                    Axis::Phase(p) => ("phase", Some(*p)),
                };
                GateRecord::Rot {
                    spins: spins.iter().map(|k| k + 1).collect(),
                    axis: name.to_string(),
                    angle_rad: *angle,
                    phase_rad,
                }
            }
            Gate::Toffoli { c1, c2, target } => GateRecord::Toffoli {
                controls: [c1 + 1, c2 + 1],
                target: target + 1,
            },
            Gate::PauliExp { pauli, theta } => GateRecord::PauliExp {
                pauli: pauli.to_string(),
                theta_rad: *theta,
            },
        }
    }

    pub fn to_gate(&self, nspins: usize) -> Result<Gate> {
        let idx = |k: usize| {
            if k == 0 || k > nspins {
                Err(Error::IndexOutOfRange { index: k, nspins })
            } else {
                Ok(k - 1)
            }
        };
        let g = match self {
            GateRecord::H { spin } => Gate::Hadamard(idx(*spin)?),
            GateRecord::Cnot { control, target } => Gate::cnot(idx(*control)?, idx(*target)?),
            GateRecord::Rot {
                spins,
                axis,
                angle_rad,
                phase_rad,
            } => {
                let axis = match (axis.as_str(), phase_rad) {
                    ("x", _) => Axis::X,
                    ("y", _) => Axis::Y,
                    ("z", _) => Axis::Z,
                    ("-x", _) => Axis::NegX,
                    ("-y", _) => Axis::NegY,
                    ("phase", Some(p)) => Axis::Phase(*p),
                    (other, _) => return Err(Error::InvalidArgument(format!("unknown rotation axis `{other}`"))),
                };
                let spins = spins.iter().map(|k| idx(*k)).collect::<Result<Vec<_>>>()?;
                Gate::rot(&spins, axis, *angle_rad)
            }
            GateRecord::Toffoli { controls, target } => Gate::Toffoli {
                c1: idx(controls[0])?,
                c2: idx(controls[1])?,
                target: idx(*target)?,
            },
            GateRecord::PauliExp { pauli, theta_rad } => Gate::PauliExp {
                pauli: pauli.parse()?,
                theta: *theta_rad,
            },
        };
        g.validate(nspins)?;
        Ok(g)
    }
}

fn pexp(labels: &str, theta: f64) -> Gate {
    Gate::PauliExp {
        pauli: labels.parse().expect("static label"),
        theta,
    }
}

/// The three commuting exponentials `e^{i pi/4 X_B} e^{i pi/4 Z_A} e^{-i pi/4 X_B Z_A}`
/// for control A = spin 0, target B = spin 1, without the scalar prefactor.
pub fn cnot_exponential_product() -> DenseMatrix {
    // exp(i a P) = exp(-i (-a) P); the rightmost factor acts first
    Circuit::from_gates(
        2,
        vec![pexp("ZX", FRAC_PI_4), pexp("ZI", -FRAC_PI_4), pexp("IX", -FRAC_PI_4)],
    )
    .expect("valid")
    .unitary()
}

/// `e^{-i pi/4}` times [`cnot_exponential_product`]: the c-NOT, phase included.
pub fn cnot_from_exponentials() -> DenseMatrix {
    cnot_exponential_product().scale(Complex64::from_polar(1.0, -FRAC_PI_4))
}

/// `i e^{-i pi/2 X} e^{-i pi/4 Y}`: the Hadamard, phase included.
pub fn hadamard_from_exponentials() -> DenseMatrix {
    Circuit::from_gates(1, vec![pexp("Y", FRAC_PI_4), pexp("X", FRAC_PI_2)])
        .expect("valid")
        .unitary()
        .scale(Complex64::new(0.0, 1.0))
}

/// The printed eleven-factor encoding product on (spin 1, spin 2, ancilla),
/// leftmost factor applied last.
pub fn printed_encoding_product() -> DenseMatrix {
    // factors as printed, left to right: (labels, theta) for exp(-i theta P)
    let printed = [
        ("IIX", FRAC_PI_2),
        ("IIY", FRAC_PI_4),
        ("IIX", -FRAC_PI_4),
        ("IXI", FRAC_PI_2),
        ("IYI", FRAC_PI_4),
        ("IXI", -FRAC_PI_4),
        ("XII", FRAC_PI_2),
        ("YII", FRAC_PI_4),
        ("XII", -FRAC_PI_4),
        ("ZIX", FRAC_PI_4),
        ("ZXI", FRAC_PI_4),
    ];
    let gates = printed.iter().rev().map(|(l, t)| pexp(l, *t)).collect();
    Circuit::from_gates(3, gates).expect("valid").unitary()
}

/// Best-effort comparison of the printed encoding product with a circuit.
pub fn compare_printed_encoding(encoder: &Circuit) -> PhaseMatch {
    equal_up_to_global_phase(&printed_encoding_product(), &encoder.unitary(), OPERATOR_TOL)
}
