//! Teleportation of `R_β = exp(i(π/4)σ^β)` through two ancilla spins.
//!
//! Spin 0 holds the data, spins 1 and 2 the ancillas. One cycle is three
//! measurements at most:
//!
//! ```text
//! Alice S²(d,1) ── S=0 ──────────────────────────────── (i)   output on far spin
//!        └─ S=1 ── S_β²(d,1) ── 0 ──────────────────── (ii)  output on far spin
//!                       └─ 1 ── Bob S²(1,far) ── S=0 ─ (iii) output on d
//!                                        └─ S=1 ────── (iv)  output on d
//! ```
//!
//! where `d` is the spin currently holding the data and `far = 2 − d`. The
//! controller tracks the ancilla pair and the power `k` with output `∝ R^k|ψ⟩`;
//! a cycle adds a power that depends only on the pair kind and the branch.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{require_single_qubit, Applied, ProtocolError, ProtocolSetup};
use crate::exchange::{cool_to_singlet, x_subspace_pulse, z_subspace_pulse, Axis, ExchangePulse};
use crate::observables::{
    make_observable, measure_branches, measure_sample, Branch, MeasurementRecord, ObservableError, ObservableKind, ProjectiveObservable,
};
use crate::qstate::{StateVector, DEFAULT_TOL};

/// Readout of the single-spin measurement on the cooled singlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepOutcome {
    /// `|01⟩` (z) or `|+−⟩` (x).
    Aligned,
    /// `|10⟩` (z) or `|−+⟩` (x).
    Swapped,
}

impl PrepOutcome {
    pub fn seed_label(self, axis: Axis) -> &'static str {
        match (axis, self) {
            (Axis::Z, PrepOutcome::Aligned) => "01",
            (Axis::Z, PrepOutcome::Swapped) => "10",
            (Axis::X, PrepOutcome::Aligned) => "+-",
            (Axis::X, PrepOutcome::Swapped) => "-+",
        }
    }
}

/// State of the two spins not holding the data, as far as the controller knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaPair {
    /// Freshly pulsed pair, `(|01⟩ − i|10⟩)/√2` or its counterpart.
    Twisted(PrepOutcome),
    Singlet,
    /// `|T₀⟩` for the z axis, `|T₀ˣ⟩` for x.
    Triplet,
}

/// Terminal branch of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleBranch {
    AliceSinglet,
    AliceAxisZero,
    BobSinglet,
    BobTriplet,
}

impl CycleBranch {
    pub const ALL: [CycleBranch; 4] =
        [CycleBranch::AliceSinglet, CycleBranch::AliceAxisZero, CycleBranch::BobSinglet, CycleBranch::BobTriplet];

    pub fn index(self) -> usize {
        match self {
            CycleBranch::AliceSinglet => 0,
            CycleBranch::AliceAxisZero => 1,
            CycleBranch::BobSinglet => 2,
            CycleBranch::BobTriplet => 3,
        }
    }

    pub fn roman(self) -> &'static str {
        ["i", "ii", "iii", "iv"][self.index()]
    }

    /// Cycle measurements on the path to this branch.
    pub fn measurements(self) -> usize {
        [1, 2, 3, 3][self.index()]
    }

    /// Whether the data ends on the spin opposite to where it started.
    pub fn moves_data(self) -> bool {
        matches!(self, CycleBranch::AliceSinglet | CycleBranch::AliceAxisZero)
    }

    /// Pair left behind on the two non-output spins.
    pub fn pair_after(self) -> AncillaPair {
        match self {
            CycleBranch::AliceSinglet | CycleBranch::BobSinglet => AncillaPair::Singlet,
            CycleBranch::AliceAxisZero | CycleBranch::BobTriplet => AncillaPair::Triplet,
        }
    }
}

impl AncillaPair {
    /// Power of `R` this branch adds to the data, mod 4.
    pub fn power(self, branch: CycleBranch) -> u8 {
        let table = match self {
            AncillaPair::Twisted(PrepOutcome::Aligned) => [1, 3, 3, 1],
            AncillaPair::Twisted(PrepOutcome::Swapped) => [3, 1, 1, 3],
            AncillaPair::Singlet => [0, 2, 0, 2],
            AncillaPair::Triplet => [2, 0, 2, 0],
        };
        table[branch.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stage {
    AliceTotal,
    AliceAxis,
    BobTotal,
}

pub(crate) enum Step {
    Continue(Stage),
    Finish(CycleBranch),
}

impl Stage {
    pub(crate) fn next(self, outcome_index: usize) -> Step {
        match (self, outcome_index) {
            (Stage::AliceTotal, 0) => Step::Finish(CycleBranch::AliceSinglet),
            (Stage::AliceTotal, _) => Step::Continue(Stage::AliceAxis),
            (Stage::AliceAxis, 0) => Step::Finish(CycleBranch::AliceAxisZero),
            (Stage::AliceAxis, _) => Step::Continue(Stage::BobTotal),
            (Stage::BobTotal, 0) => Step::Finish(CycleBranch::BobSinglet),
            (Stage::BobTotal, _) => Step::Finish(CycleBranch::BobTriplet),
        }
    }
}

/// The five observables a cycle can need, built once per run.
#[derive(Debug, Clone)]
pub(crate) struct CycleKit {
    alice_total: [ProjectiveObservable; 2],
    alice_axis: [ProjectiveObservable; 2],
    bob_total: [ProjectiveObservable; 2],
}

impl CycleKit {
    pub(crate) fn new(axis: Axis) -> Result<Self, ObservableError> {
        let axis_kind = |i, j| match axis {
            Axis::Z => ObservableKind::SzSq(i, j),
            Axis::X => ObservableKind::SxSq(i, j),
        };
        Ok(Self {
            alice_total: [make_observable(ObservableKind::TotalSpinSq(0, 1))?, make_observable(ObservableKind::TotalSpinSq(2, 1))?],
            alice_axis: [make_observable(axis_kind(0, 1))?, make_observable(axis_kind(2, 1))?],
            bob_total: [make_observable(ObservableKind::TotalSpinSq(1, 2))?, make_observable(ObservableKind::TotalSpinSq(1, 0))?],
        })
    }

    pub(crate) fn observable(&self, stage: Stage, data: usize) -> &ProjectiveObservable {
        let slot = usize::from(data != 0);
        match stage {
            Stage::AliceTotal => &self.alice_total[slot],
            Stage::AliceAxis => &self.alice_axis[slot],
            Stage::BobTotal => &self.bob_total[slot],
        }
    }
}

/// Classical knowledge about the three-spin register between cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct Controller {
    pub data: usize,
    pub pair: AncillaPair,
    pub power: u8,
}

impl Controller {
    pub(crate) fn fresh(outcome: PrepOutcome) -> Self {
        Self { data: 0, pair: AncillaPair::Twisted(outcome), power: 0 }
    }

    pub(crate) fn finish(self, branch: CycleBranch) -> Self {
        Self {
            data: if branch.moves_data() { 2 - self.data } else { self.data },
            pair: branch.pair_after(),
            power: (self.power + self.pair.power(branch)) % 4,
        }
    }

    pub(crate) fn applied(self) -> Applied {
        Applied::from_power(self.power)
    }
}

/// A freshly prepared ancilla pair, as a 2-spin state on spins (1, 2).
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPair {
    pub state: StateVector,
    pub outcome: PrepOutcome,
    pub record: MeasurementRecord,
}

fn prep_readout(axis: Axis) -> ObservableKind {
    match axis {
        Axis::Z => ObservableKind::PauliZ(0),
        Axis::X => ObservableKind::PauliX(0),
    }
}

fn prep_pulse(setup: &ProtocolSetup) -> crate::qstate::UnitaryMatrix {
    match setup.axis {
        Axis::Z => z_subspace_pulse(setup.phi_z0),
        Axis::X => x_subspace_pulse(setup.phi_z0),
    }
}

fn prep_outcome_of(branch: &Branch) -> PrepOutcome {
    if branch.outcome_index == 0 {
        PrepOutcome::Aligned
    } else {
        PrepOutcome::Swapped
    }
}

/// Cool, read out one ancilla, pulse the pair.
pub fn prepare_entangled_ancilla<R: Rng + ?Sized>(setup: &ProtocolSetup, rng: &mut R) -> Result<PreparedPair, ProtocolError> {
    let singlet = cool_to_singlet(&setup.couplings)?;
    let readout = make_observable(prep_readout(setup.axis))?;
    let branch = measure_sample(&singlet, &readout, rng)?;
    let outcome = prep_outcome_of(&branch);
    let state = branch.state.apply(&prep_pulse(setup), &[0, 1])?;
    Ok(PreparedPair { state, outcome, record: branch.record })
}

/// The pair that preparation yields for a given readout, without sampling.
pub fn prepared_pair(setup: &ProtocolSetup, outcome: PrepOutcome) -> Result<StateVector, ProtocolError> {
    let seed = StateVector::from_label(outcome.seed_label(setup.axis))?;
    Ok(seed.apply(&prep_pulse(setup), &[0, 1])?)
}

/// Both preparation branches from the cooled singlet, each already pulsed.
pub(crate) fn preparation_branches(setup: &ProtocolSetup) -> Result<Vec<(PreparedPair, f64)>, ProtocolError> {
    let singlet = cool_to_singlet(&setup.couplings)?;
    let readout = make_observable(prep_readout(setup.axis))?;
    let pulse = prep_pulse(setup);
    measure_branches(&singlet, &readout)?
        .into_iter()
        .map(|b| {
            let p = b.record.probability;
            let outcome = prep_outcome_of(&b);
            let state = b.state.apply(&pulse, &[0, 1])?;
            Ok((PreparedPair { state, outcome, record: b.record }, p))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranscriptEvent {
    Preparation(MeasurementRecord),
    Measurement(MeasurementRecord),
    Pulse { label: String },
}

/// Record of one sampled run of the `R_β` protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTranscript {
    pub axis: Axis,
    pub events: Vec<TranscriptEvent>,
    pub branches: Vec<CycleBranch>,
    pub applied: Applied,
    pub output_qubit: usize,
    pub pair: AncillaPair,
    pub cycles: usize,
    /// Cycle measurements only; preparation readouts are counted separately.
    pub measurements: usize,
    pub preparation_measurements: usize,
    pub zz_corrected: bool,
    #[serde(skip)]
    pub final_state: StateVector,
    #[serde(skip)]
    pub(crate) power: u8,
}

impl ProtocolTranscript {
    fn controller(&self) -> Controller {
        Controller { data: self.output_qubit, pair: self.pair, power: self.power }
    }

    fn set_controller(&mut self, c: Controller) {
        self.output_qubit = c.data;
        self.pair = c.pair;
        self.power = c.power;
        self.applied = c.applied();
    }

    /// Single-qubit state on the output spin.
    pub fn output_state(&self) -> Result<StateVector, ProtocolError> {
        Ok(self.final_state.qubit_state(self.output_qubit, DEFAULT_TOL)?)
    }

    pub fn records(&self) -> impl Iterator<Item = &MeasurementRecord> {
        self.events.iter().filter_map(|e| match e {
            TranscriptEvent::Measurement(r) | TranscriptEvent::Preparation(r) => Some(r),
            TranscriptEvent::Pulse { .. } => None,
        })
    }
}

fn run_cycle<R: Rng + ?Sized>(t: &mut ProtocolTranscript, kit: &CycleKit, rng: &mut R) -> Result<(), ProtocolError> {
    let ctl = t.controller();
    let mut stage = Stage::AliceTotal;
    loop {
        let branch = measure_sample(&t.final_state, kit.observable(stage, ctl.data), rng)?;
        t.events.push(TranscriptEvent::Measurement(branch.record));
        t.measurements += 1;
        t.final_state = branch.state;
        match stage.next(branch.outcome_index) {
            Step::Continue(s) => stage = s,
            Step::Finish(b) => {
                t.branches.push(b);
                t.cycles += 1;
                t.set_controller(ctl.finish(b));
                return Ok(());
            }
        }
    }
}

fn start<R: Rng + ?Sized>(psi: &StateVector, setup: &ProtocolSetup, rng: &mut R) -> Result<ProtocolTranscript, ProtocolError> {
    require_single_qubit(psi)?;
    let pair = prepare_entangled_ancilla(setup, rng)?;
    let ctl = Controller::fresh(pair.outcome);
    Ok(ProtocolTranscript {
        axis: setup.axis,
        events: vec![TranscriptEvent::Preparation(pair.record)],
        branches: Vec::new(),
        applied: Applied::Pending,
        output_qubit: ctl.data,
        pair: ctl.pair,
        cycles: 0,
        measurements: 0,
        preparation_measurements: 1,
        zz_corrected: false,
        final_state: psi.tensor(&pair.state)?,
        power: ctl.power,
    })
}

/// One full cycle on `|ψ⟩` with freshly prepared ancillas.
pub fn teleport_cycle<R: Rng + ?Sized>(psi: &StateVector, setup: &ProtocolSetup, rng: &mut R) -> Result<ProtocolTranscript, ProtocolError> {
    let kit = CycleKit::new(setup.axis)?;
    let mut t = start(psi, setup, rng)?;
    run_cycle(&mut t, &kit, rng)?;
    Ok(t)
}

/// Runs another cycle directly on an erred register.
pub fn correction_cycle<R: Rng + ?Sized>(erred: &ProtocolTranscript, rng: &mut R) -> Result<ProtocolTranscript, ProtocolError> {
    if erred.applied != Applied::RDagger {
        return Err(ProtocolError::NotErred(erred.applied));
    }
    let kit = CycleKit::new(erred.axis)?;
    let mut t = erred.clone();
    run_cycle(&mut t, &kit, rng)?;
    Ok(t)
}

/// Pulse `U(π/2, 0) = Z⊗Z` on the data spin and the middle spin.
pub(crate) fn zz_pulse(data: usize) -> Result<ExchangePulse, ProtocolError> {
    Ok(ExchangePulse::new(data, 1, FRAC_PI_2, 0.0)?)
}

/// Turns `R_z†|ψ⟩` into `R_z|ψ⟩` with one pure-`φ⊥` pulse.
pub fn zz_correction(erred: &ProtocolTranscript, setup: &ProtocolSetup) -> Result<ProtocolTranscript, ProtocolError> {
    if erred.applied != Applied::RDagger {
        return Err(ProtocolError::NotErred(erred.applied));
    }
    check_zz_allowed(setup)?;
    let pulse = zz_pulse(erred.output_qubit)?;
    let mut t = erred.clone();
    t.final_state = t.final_state.apply(&pulse.unitary(), &pulse.targets())?;
    t.events.push(TranscriptEvent::Pulse { label: format!("U({},1)(pi/2,0)", erred.output_qubit) });
    let ctl = t.controller();
    t.set_controller(Controller { power: (ctl.power + 2) % 4, pair: flip_pair(ctl.pair), ..ctl });
    t.zz_corrected = true;
    Ok(t)
}

fn flip_pair(pair: AncillaPair) -> AncillaPair {
    match pair {
        AncillaPair::Singlet => AncillaPair::Triplet,
        AncillaPair::Triplet => AncillaPair::Singlet,
        twisted => twisted,
    }
}

fn check_zz_allowed(setup: &ProtocolSetup) -> Result<(), ProtocolError> {
    if setup.axis != Axis::Z {
        return Err(ProtocolError::InvalidPolicy("zz correction needs the z axis".into()));
    }
    if !setup.couplings.model().has_pure_perp_pulse() {
        return Err(crate::exchange::ExchangeError::NoPurePerpPulse(setup.couplings.model()).into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionMode {
    /// Run further measurement cycles on the erred register.
    Repeat,
    /// Fix the first error with a `Z⊗Z` pulse.
    Zz,
}

impl std::fmt::Display for CorrectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrectionMode::Repeat => "repeat",
            CorrectionMode::Zz => "zz",
        })
    }
}

impl std::str::FromStr for CorrectionMode {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "repeat" | "repeat_flipped" => Ok(CorrectionMode::Repeat),
            "zz" | "zz_pulse" => Ok(CorrectionMode::Zz),
            other => Err(ProtocolError::InvalidPolicy(format!("unknown correction mode {other:?}"))),
        }
    }
}

/// How the driver reacts to an erred cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverPolicy {
    max_cycles: usize,
    correction: CorrectionMode,
}

impl DriverPolicy {
    pub fn new(max_cycles: usize, correction: CorrectionMode) -> Result<Self, ProtocolError> {
        if max_cycles == 0 {
            return Err(ProtocolError::InvalidPolicy("max_cycles must be at least 1".into()));
        }
        Ok(Self { max_cycles, correction })
    }

    pub fn max_cycles(&self) -> usize {
        self.max_cycles
    }

    pub fn correction(&self) -> CorrectionMode {
        self.correction
    }

    /// Rejects combinations the device cannot run.
    pub fn check(&self, setup: &ProtocolSetup) -> Result<(), ProtocolError> {
        match self.correction {
            CorrectionMode::Repeat => Ok(()),
            CorrectionMode::Zz => check_zz_allowed(setup),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationOutcome {
    pub transcript: ProtocolTranscript,
    /// State of the output spin.
    pub output: StateVector,
    pub success: bool,
}

/// Drives cycles until `R_β` is applied or the cycle budget runs out.
pub fn teleport_rotation<R: Rng + ?Sized>(
    psi: &StateVector,
    setup: &ProtocolSetup,
    policy: &DriverPolicy,
    rng: &mut R,
) -> Result<RotationOutcome, ProtocolError> {
    policy.check(setup)?;
    let kit = CycleKit::new(setup.axis)?;
    let mut t = start(psi, setup, rng)?;
    run_cycle(&mut t, &kit, rng)?;
    while t.applied == Applied::RDagger {
        match policy.correction {
            CorrectionMode::Zz => t = zz_correction(&t, setup)?,
            CorrectionMode::Repeat if t.cycles < policy.max_cycles => run_cycle(&mut t, &kit, rng)?,
            CorrectionMode::Repeat => break,
        }
    }
    let output = t.output_state()?;
    Ok(RotationOutcome { success: t.applied.is_success(), output, transcript: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{r_gate, ExchangeCouplings};
    use crate::observables::trial_stream;
    use crate::protocols::r_phase;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(axis: Axis) -> ProtocolSetup {
        ProtocolSetup { axis, ..ProtocolSetup::default() }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn target(psi: &StateVector, axis: Axis, applied: Applied) -> StateVector {
        psi.apply(&r_gate(axis, applied == Applied::RDagger), &[0]).unwrap()
    }

    #[test]
    fn three_spin_expansion_matches_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let psi = StateVector::random(1, &mut rng);
            let (a, b) = (psi.amplitude(0), psi.amplitude(1));
            let pair = prepared_pair(&ProtocolSetup::default(), PrepOutcome::Aligned).unwrap();
            let lhs = psi.tensor(&pair).unwrap();

            let r = r_phase();
            let rz = psi.apply(&r_gate(Axis::Z, false), &[0]).unwrap();
            let rzd = psi.apply(&r_gate(Axis::Z, true), &[0]).unwrap();
            let t0 = StateVector::triplet0().tensor(&rzd).unwrap();
            let s = StateVector::singlet().tensor(&rz).unwrap();
            let s2 = 2f64.sqrt();
            let rhs: Vec<Complex64> = (0..8)
                .map(|k| {
                    let direct = match k {
                        0b001 => a / s2,
                        0b110 => -c(0.0, 1.0) * b / s2,
                        _ => c(0.0, 0.0),
                    };
                    direct + r * 0.5 * t0.amplitude(k) - r.conj() * 0.5 * s.amplitude(k)
                })
                .collect();
            let max = (0..8).map(|k| (lhs.amplitude(k) - rhs[k]).norm()).fold(0.0, f64::max);
            assert!(max < 1e-10, "max deviation {max}");
        }
    }

    #[test]
    fn power_table_tracks_every_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for axis in [Axis::Z, Axis::X] {
            for seed in 0..200u64 {
                let psi = StateVector::random(1, &mut rng);
                let mut s = trial_stream(seed, 0);
                let t = teleport_cycle(&psi, &setup(axis), &mut s).unwrap();
                let out = t.output_state().unwrap();
                assert!(out.equal_up_to_global_phase(&target(&psi, axis, t.applied), 1e-10).unwrap());
                assert_eq!(t.measurements, t.branches[0].measurements());
            }
        }
    }

    #[test]
    fn correction_rejects_success() {
        let psi = StateVector::zero();
        let mut s = trial_stream(3, 0);
        let t = (0..).map(|_| teleport_cycle(&psi, &ProtocolSetup::default(), &mut s).unwrap()).find(|t| t.applied == Applied::R).unwrap();
        assert_eq!(correction_cycle(&t, &mut s), Err(ProtocolError::NotErred(Applied::R)));
    }

    #[test]
    fn zz_needs_tunable_model() {
        let heis = ProtocolSetup { couplings: ExchangeCouplings::heisenberg(1.0), ..ProtocolSetup::default() };
        let policy = DriverPolicy::new(3, CorrectionMode::Zz).unwrap();
        assert!(policy.check(&heis).is_err());
        assert!(policy.check(&setup(Axis::X)).is_err());
        assert!(policy.check(&ProtocolSetup::default()).is_ok());
        assert!(DriverPolicy::new(0, CorrectionMode::Repeat).is_err());
    }

    #[test]
    fn zz_mode_always_succeeds_in_one_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let policy = DriverPolicy::new(1, CorrectionMode::Zz).unwrap();
        for trial in 0..100 {
            let psi = StateVector::random(1, &mut rng);
            let out = teleport_rotation(&psi, &ProtocolSetup::default(), &policy, &mut trial_stream(4, trial)).unwrap();
            assert!(out.success);
            assert_eq!(out.transcript.cycles, 1);
            assert!(out.output.equal_up_to_global_phase(&target(&psi, Axis::Z, Applied::R), 1e-10).unwrap());
        }
    }

    #[test]
    fn driver_stops_at_cap() {
        let policy = DriverPolicy::new(2, CorrectionMode::Repeat).unwrap();
        let mut failures = 0;
        for trial in 0..400 {
            let out = teleport_rotation(&StateVector::plus(), &ProtocolSetup::default(), &policy, &mut trial_stream(8, trial)).unwrap();
            assert!(out.transcript.cycles <= 2);
            if !out.success {
                failures += 1;
                assert_eq!(out.transcript.cycles, 2);
                assert_eq!(out.transcript.applied, Applied::RDagger);
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn transcript_serializes_without_state() {
        let t = teleport_cycle(&StateVector::zero(), &ProtocolSetup::default(), &mut trial_stream(1, 1)).unwrap();
        let json = serde_json::to_value(&t).unwrap();
        assert!(json.get("final_state").is_none());
        assert!(json["applied"] == "R" || json["applied"] == "R_dagger");
        assert_eq!(json["events"][0]["kind"], "preparation");
    }
}
