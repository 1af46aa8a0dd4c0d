//! `Z` rotation of a phase qubit from a Josephson gate and one readout.
//!
//! The ancilla idles in `|+⟩`. After `e^{−iφZZ/2}` a `Z` readout of the
//! ancilla leaves the data in `e^{−iφZ/2}|ψ⟩` (outcome 0) or
//! `e^{+iφZ/2}|ψ⟩` (outcome 1); the latter is fixed by `e^{+iφZZ}`.

use rand::Rng;
use serde::Serialize;

use super::{require_single_qubit, ProtocolError};
use crate::exchange::{josephson_gate, ExchangePulse};
use crate::observables::{make_observable, measure_branches, measure_sample, Branch, MeasurementRecord, ObservableKind};
use crate::qstate::{gates, StateVector, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgbOutcome {
    #[serde(skip)]
    pub output: StateVector,
    pub record: MeasurementRecord,
    pub corrected: bool,
}

/// `e^{+iφZ⊗Z}` as an exchange pulse on (data, ancilla).
pub fn dgb_correction_pulse(phi: f64) -> ExchangePulse {
    ExchangePulse::new(0, 1, 0.0, -phi).expect("distinct spins")
}

/// `e^{−iφZ/2}|ψ⟩`.
pub fn dgb_target(psi: &StateVector, phi: f64) -> Result<StateVector, ProtocolError> {
    Ok(psi.apply(&gates::pauli_exp(phi / 2.0, &gates::pauli_z()), &[0])?)
}

fn entangle(psi: &StateVector, phi: f64) -> Result<StateVector, ProtocolError> {
    require_single_qubit(psi)?;
    Ok(psi.tensor(&StateVector::plus())?.apply(&josephson_gate(phi), &[0, 1])?)
}

fn finish(branch: Branch, phi: f64) -> Result<DgbOutcome, ProtocolError> {
    let corrected = branch.outcome_index == 1;
    let state = if corrected {
        let pulse = dgb_correction_pulse(phi);
        branch.state.apply(&pulse.unitary(), &pulse.targets())?
    } else {
        branch.state
    };
    Ok(DgbOutcome { output: state.qubit_state(0, DEFAULT_TOL)?, record: branch.record, corrected })
}

pub fn dgb_z_rotation<R: Rng + ?Sized>(psi: &StateVector, phi: f64, rng: &mut R) -> Result<DgbOutcome, ProtocolError> {
    let state = entangle(psi, phi)?;
    let readout = make_observable(ObservableKind::PauliZ(1))?;
    finish(measure_sample(&state, &readout, rng)?, phi)
}

/// Every readout branch with its exact probability.
pub fn dgb_branches(psi: &StateVector, phi: f64) -> Result<Vec<DgbOutcome>, ProtocolError> {
    let state = entangle(psi, phi)?;
    let readout = make_observable(ObservableKind::PauliZ(1))?;
    measure_branches(&state, &readout)?.into_iter().map(|b| finish(b, phi)).collect()
}
