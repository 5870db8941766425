//! Quantum codes against coherent Ising (`zz`) evolution.
//!
//! - [`pauli`], [`operator`], [`dense`]: exact product-operator algebra.
//! - [`circuit`]: gate-level circuits and their unitaries.
//! - [`codes`]: encode / error / decode / correct pipelines and code checks.
//! - [`nmr`]: pulse-level simulation of the three-spin alanine experiment.

pub mod circuit;
pub mod codes;
pub mod dense;
pub mod error;
pub mod nmr;
pub mod operator;
pub mod pauli;
pub mod random;

pub use dense::{equal_up_to_global_phase, DenseMatrix, PhaseMatch, OPERATOR_TOL};
pub use error::{Error, Result};
pub use operator::{exp_pauli, CoherenceComponent, OperatorSum, TermRecord};
pub use pauli::{pauli_product, Pauli, PauliString, Phase, MAX_SPINS};
pub use circuit::{circuit_unitary, conjugate, gate_unitary, Axis, Circuit, Gate, GateRecord};
