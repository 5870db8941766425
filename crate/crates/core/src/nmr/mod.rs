//! Pulse-level simulation of the three-spin alanine experiment.

pub mod acquire;
pub mod report;
pub mod sequence;
pub mod spectrum;
pub mod system;

pub use acquire::{acquire, AcquireParams, Fid, Spectrum1D};
pub use sequence::{
    apply_crusher, code_sequences, compare_with_gates, evolve_delay, fit_zz_exponential, prepare_initial, refocused_zz,
    CodeSequences, DelayHamiltonian, InitialState, PulseEvent, PulseGateReport, PulseSequence,
};
pub use spectrum::{
    run_2d_experiment, DoubletPhase, Experiment2D, ExperimentConfig, ExperimentSummary, Peak, PeakList, Spectrum2D,
};
pub use system::SpinSystem;
