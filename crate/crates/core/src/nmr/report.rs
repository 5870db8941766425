//! Pulse-level checks: pulse vs gate pipeline and the refocused coupling period.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::sequence::{compare_with_gates, fit_zz_exponential, prepare_initial, refocused_zz, InitialState, PulseGateReport};
use super::system::SpinSystem;
use crate::error::Result;
use crate::random::seeded;

/// Pulse vs gate agreement on data-reduced operators.
pub const PULSE_GATE_TOL: f64 = 1e-8;
/// Purity of the refocused coupling propagator.
pub const REFOCUS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct RefocusCheck {
    pub tau: f64,
    pub offsets_hz: Vec<f64>,
    pub j_hz: [f64; 3],
    /// Fitted `theta` in `exp(-i theta Z1 Z2)`, on the branch (mod pi) nearest `expected_theta`.
    pub theta: f64,
    /// `(pi/2) J12 tau`
    pub expected_theta: f64,
    /// `tau_eff = 2 theta / (pi J12)`
    pub tau_eff: f64,
    pub deviation: f64,
    pub pass: bool,
}

pub fn check_refocusing(sys: &SpinSystem, tau: f64) -> Result<RefocusCheck> {
    let u = refocused_zz(tau)?.propagator(sys)?;
    let fit = fit_zz_exponential(&u, 0, 1)?;
    let expected = 0.5 * PI * sys.j(0, 1) * tau;
    // theta is only defined modulo pi
    let wrapped = (fit.theta - expected + PI / 2.0).rem_euclid(PI) - PI / 2.0;
    let theta = expected + wrapped;
    Ok(RefocusCheck {
        tau,
        offsets_hz: sys.offsets_hz.clone(),
        j_hz: [sys.j(0, 1), sys.j(0, 2), sys.j(1, 2)],
        theta,
        expected_theta: expected,
        tau_eff: 2.0 * theta / (PI * sys.j(0, 1)),
        deviation: fit.deviation,
        pass: fit.deviation < REFOCUS_TOL && wrapped.abs() < REFOCUS_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PreparationCheck {
    pub initial: InitialState,
    /// `max |rho - B (x) E+|`
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PulsesReport {
    pub pulse_gate_tolerance: f64,
    pub refocus_tolerance: f64,
    pub pulse_gate: PulseGateReport,
    pub preparations: Vec<PreparationCheck>,
    pub refocusing: Vec<RefocusCheck>,
    pub pass: bool,
}

/// Refocusing is checked on the given system and on `random_systems` variants with
/// random offsets and spectator couplings.
pub fn verify_pulses(sys: &SpinSystem, phis: &[f64], taus: &[f64], random_systems: usize, seed: u64) -> Result<PulsesReport> {
    let pulse_gate = compare_with_gates(sys, phis)?;
    let e_plus = crate::operator::OperatorSum::e_plus(1, 0);
    let preparations = InitialState::ALL
        .iter()
        .map(|&i| {
            let want = i.data_operator().kron(&e_plus);
            Ok(PreparationCheck {
                initial: i,
                deviation: prepare_initial(sys, i)?.dense_distance(&want)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut systems = vec![sys.clone()];
    let mut rng = seeded(seed);
    for _ in 0..random_systems {
        let mut s = sys.clone();
        for o in s.offsets_hz.iter_mut() {
            *o = rng.random_range(-20000.0..20000.0);
        }
        s.set_coupling(0, 2, rng.random_range(-100.0..100.0));
        s.set_coupling(1, 2, rng.random_range(-100.0..100.0));
        systems.push(s);
    }
    let mut refocusing = Vec::new();
    for s in &systems {
        for &tau in taus {
            refocusing.push(check_refocusing(s, tau)?);
        }
    }
    let pass = pulse_gate.max_deviation < PULSE_GATE_TOL
        && pulse_gate.decode_roundtrip_deviation < PULSE_GATE_TOL
        && preparations.iter().all(|p| p.deviation < PULSE_GATE_TOL)
        && refocusing.iter().all(|r| r.pass);
    Ok(PulsesReport {
        pulse_gate_tolerance: PULSE_GATE_TOL,
        refocus_tolerance: REFOCUS_TOL,
        pulse_gate,
        preparations,
        refocusing,
        pass,
    })
}
