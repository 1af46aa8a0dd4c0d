//! State teleportation and recursive single-qubit gate teleportation.
//!
//! Spin 0 holds `|ψ⟩`, spins 1 and 2 the resource. A Bell measurement on
//! (0, 1) with outcome `σ^α` leaves spin 2 in `σ^α|ψ⟩`. For gate
//! teleportation the resource is `(I⊗Vσ^β)|Φ⁺⟩`, spin 2 ends in
//! `Vσ^βσ^α|ψ⟩`, and when `α ≠ β` the correction `Vσ^βσ^αV†` is itself
//! teleported.

use rand::Rng;
use serde::Serialize;

use super::{require_single_qubit, ProtocolError};
use crate::observables::{make_observable, measure_branches, measure_sample, MeasurementRecord, ObservableKind, ProjectiveObservable};
use crate::qstate::{gates, StateVector, UnitaryMatrix, DEFAULT_TOL};

pub const DEFAULT_TRIAL_CAP: usize = 100;

const PAULI_LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateTeleportOutcome {
    #[serde(skip)]
    pub output: StateVector,
    /// Bell outcome as a Pauli index, 0..4 for I, X, Y, Z.
    pub alpha: usize,
    pub record: MeasurementRecord,
}

/// `σ^α|ψ⟩` after the Bell measurement is undone.
fn corrected_output(state: &StateVector, alpha: usize) -> Result<StateVector, ProtocolError> {
    let bob = state.qubit_state(2, DEFAULT_TOL)?;
    Ok(bob.apply(&gates::paulis()[alpha], &[0])?)
}

fn bell() -> Result<ProjectiveObservable, ProtocolError> {
    Ok(make_observable(ObservableKind::BellBasis(0, 1))?)
}

fn teleport_register(psi: &StateVector) -> Result<StateVector, ProtocolError> {
    require_single_qubit(psi)?;
    Ok(psi.tensor(&StateVector::bell_phi_plus())?)
}

pub fn state_teleport<R: Rng + ?Sized>(psi: &StateVector, rng: &mut R) -> Result<StateTeleportOutcome, ProtocolError> {
    let b = measure_sample(&teleport_register(psi)?, &bell()?, rng)?;
    Ok(StateTeleportOutcome { output: corrected_output(&b.state, b.outcome_index)?, alpha: b.outcome_index, record: b.record })
}

pub fn state_teleport_branches(psi: &StateVector) -> Result<Vec<StateTeleportOutcome>, ProtocolError> {
    measure_branches(&teleport_register(psi)?, &bell()?)?
        .into_iter()
        .map(|b| {
            Ok(StateTeleportOutcome { output: corrected_output(&b.state, b.outcome_index)?, alpha: b.outcome_index, record: b.record })
        })
        .collect()
}

/// The basis `{(I⊗Vσ^β)|Φ⁺⟩}` used to prepare the resource offline.
pub fn resource_basis(v: &UnitaryMatrix) -> Result<Vec<(String, StateVector)>, ProtocolError> {
    gates::paulis()
        .iter()
        .enumerate()
        .map(|(beta, sigma)| {
            let op = v * sigma;
            Ok((PAULI_LABELS[beta].to_string(), StateVector::bell_phi_plus().apply(&op, &[1])?))
        })
        .collect()
}

/// One offline preparation plus one Bell measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateTeleportTrial {
    pub beta: usize,
    pub alpha: usize,
    pub resource_record: MeasurementRecord,
    pub bell_record: MeasurementRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateTeleportOutcome {
    #[serde(skip)]
    pub output: StateVector,
    pub trials: usize,
    pub history: Vec<GateTeleportTrial>,
}

/// Teleports `V` onto `|ψ⟩`, where spin 2 ends in `Vσ^βσ^α|ψ⟩`.
fn teleport_gate_once<R: Rng + ?Sized>(
    psi: &StateVector,
    v: &UnitaryMatrix,
    bell: &ProjectiveObservable,
    rng: &mut R,
) -> Result<(StateVector, GateTeleportTrial), ProtocolError> {
    let basis = make_observable(ObservableKind::CustomBasis { targets: vec![0, 1], basis: resource_basis(v)? })?;
    let prep = measure_sample(&StateVector::from_label("00")?, &basis, rng)?;
    let register = psi.tensor(&prep.state)?;
    let b = measure_sample(&register, bell, rng)?;
    let out = b.state.qubit_state(2, DEFAULT_TOL)?;
    let trial = GateTeleportTrial { beta: prep.outcome_index, alpha: b.outcome_index, resource_record: prep.record, bell_record: b.record };
    Ok((out, trial))
}

/// Repeats until a trial with `α = β`, at most `trial_cap` trials.
pub fn gate_teleport<R: Rng + ?Sized>(
    psi: &StateVector,
    u: &UnitaryMatrix,
    trial_cap: usize,
    rng: &mut R,
) -> Result<GateTeleportOutcome, ProtocolError> {
    require_single_qubit(psi)?;
    if u.dim() != 2 {
        return Err(crate::qstate::StateError::BadShape.into());
    }
    let paulis = gates::paulis();
    let bell = bell()?;
    let mut state = psi.clone();
    let mut v = u.clone();
    let mut history = Vec::new();
    while history.len() < trial_cap {
        let (out, trial) = teleport_gate_once(&state, &v, &bell, rng)?;
        let (alpha, beta) = (trial.alpha, trial.beta);
        history.push(trial);
        if alpha == beta {
            return Ok(GateTeleportOutcome { output: out, trials: history.len(), history });
        }
        let m = &(&(&v * &paulis[beta]) * &paulis[alpha]) * &v.dagger();
        state = out;
        v = m;
    }
    Err(ProtocolError::TrialCapExceeded(trial_cap))
}

/// One row of the single-trial outcome table.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTrialBranch {
    pub beta: usize,
    pub alpha: usize,
    pub probability: f64,
    /// `Vσ^βσ^α|ψ⟩` on spin 2.
    pub output: StateVector,
}

/// Exact outcome table of a single trial of teleporting `V` onto `|ψ⟩`.
pub fn gate_teleport_trial_branches(psi: &StateVector, v: &UnitaryMatrix) -> Result<Vec<GateTrialBranch>, ProtocolError> {
    require_single_qubit(psi)?;
    let basis = make_observable(ObservableKind::CustomBasis { targets: vec![0, 1], basis: resource_basis(v)? })?;
    let bell = bell()?;
    let mut rows = Vec::new();
    for prep in measure_branches(&StateVector::from_label("00")?, &basis)? {
        let register = psi.tensor(&prep.state)?;
        for b in measure_branches(&register, &bell)? {
            rows.push(GateTrialBranch {
                beta: prep.outcome_index,
                alpha: b.outcome_index,
                probability: prep.record.probability * b.record.probability,
                output: b.state.qubit_state(2, DEFAULT_TOL)?,
            });
        }
    }
    Ok(rows)
}

/// Exact probability that a single trial succeeds.
pub fn gate_teleport_success_probability(psi: &StateVector, v: &UnitaryMatrix) -> Result<f64, ProtocolError> {
    Ok(gate_teleport_trial_branches(psi, v)?.iter().filter(|r| r.alpha == r.beta).map(|r| r.probability).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::trial_stream;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_bell_branch_recovers_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for psi in [StateVector::zero(), StateVector::plus(), StateVector::random(1, &mut rng)] {
            let branches = state_teleport_branches(&psi).unwrap();
            assert_eq!(branches.len(), 4);
            for b in &branches {
                assert!(b.output.equal_up_to_global_phase(&psi, 1e-10).unwrap());
                assert!((b.record.probability - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resource_basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = UnitaryMatrix::random(1, &mut rng);
        let basis = resource_basis(&v).unwrap();
        for (i, (_, a)) in basis.iter().enumerate() {
            for (j, (_, b)) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap().norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trial_table_matches_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let psi = StateVector::random(1, &mut rng);
        let v = UnitaryMatrix::random(1, &mut rng);
        let paulis = gates::paulis();
        let rows = gate_teleport_trial_branches(&psi, &v).unwrap();
        assert_eq!(rows.len(), 16);
        for r in &rows {
            let beta_mass: f64 = rows.iter().filter(|o| o.beta == r.beta).map(|o| o.probability).sum();
            assert!((r.probability - beta_mass / 4.0).abs() < 1e-12);
            let expect = psi.apply(&(&(&v * &paulis[r.beta]) * &paulis[r.alpha]), &[0]).unwrap();
            assert!(r.output.equal_up_to_global_phase(&expect, 1e-10).unwrap());
        }
        assert!((gate_teleport_success_probability(&psi, &v).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gate_teleport_applies_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for trial in 0..100 {
            let psi = StateVector::random(1, &mut rng);
            let u = if trial % 2 == 0 { UnitaryMatrix::random(1, &mut rng) } else { UnitaryMatrix::identity(1) };
            let out = gate_teleport(&psi, &u, DEFAULT_TRIAL_CAP, &mut trial_stream(14, trial)).unwrap();
            assert!(out.output.equal_up_to_global_phase(&(&u * &psi), 1e-10).unwrap());
            assert_eq!(out.history.len(), out.trials);
            assert!(out.history.last().map(|t| t.alpha == t.beta).unwrap());
        }
    }

    #[test]
    fn trial_cap_is_enforced() {
        let mut hits = 0;
        for trial in 0..50 {
            match gate_teleport(&StateVector::zero(), &gates::hadamard(), 1, &mut trial_stream(15, trial)) {
                Err(ProtocolError::TrialCapExceeded(1)) => hits += 1,
                Ok(out) => assert_eq!(out.trials, 1),
                Err(e) => panic!("{e}"),
            }
        }
        assert!(hits > 0);
    }
}
