//! Executable measurement-based protocols.
//!
//! * [`dgb`]: phase-qubit `Z` rotation from a Josephson gate, one `Z`
//!   measurement and at most one correction pulse.
//! * [`teleportation`]: textbook state teleportation and recursive gate teleportation.
//! * [`cycle`]: teleportation of `R_β` through two ancilla spins, with the
//!   repeat-until-success driver and the `ZZ`-pulse shortcut.
//! * [`tree`]: exact outcome trees for the `R_β` protocol.

pub mod cycle;
pub mod dgb;
pub mod teleportation;
pub mod tree;

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exchange::{Axis, ExchangeCouplings, ExchangeError};
use crate::observables::ObservableError;
use crate::qstate::StateError;

pub use cycle::{
    correction_cycle, prepare_entangled_ancilla, prepared_pair, teleport_cycle, teleport_rotation, zz_correction, AncillaPair,
    CorrectionMode, CycleBranch, DriverPolicy, PrepOutcome, PreparedPair, ProtocolTranscript, RotationOutcome, TranscriptEvent,
};
pub use tree::{enumerate_protocol_tree, LeafSummary, ProtocolTree, TreeSpec, MAX_TREE_CYCLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error("input must be a single-qubit state, got {0} qubits")]
    NotSingleQubit(usize),
    #[error("transcript is not in the erred state (applied = {0:?})")]
    NotErred(Applied),
    #[error("gate teleportation did not succeed within {0} trials")]
    TrialCapExceeded(usize),
    #[error("invalid driver policy: {0}")]
    InvalidPolicy(String),
    #[error("tree depth {0} outside 1..={max}", max = MAX_TREE_CYCLES)]
    TreeTooDeep(usize),
}

/// The phase `r = e^{−iπ/4}` that appears throughout the three-spin expansions.
pub fn r_phase() -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_4)
}

/// Which operation a protocol run ended up applying to its data qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Applied {
    #[serde(rename = "R")]
    R,
    #[serde(rename = "R_dagger")]
    RDagger,
    #[serde(rename = "pending")]
    Pending,
}

impl Applied {
    /// `R^k` up to global phase.
    pub(crate) fn from_power(power: u8) -> Self {
        match power % 4 {
            1 => Applied::R,
            3 => Applied::RDagger,
            _ => Applied::Pending,
        }
    }

    pub fn is_success(self) -> bool {
        self == Applied::R
    }
}

/// Everything the `R_β` protocols need to know about the device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSetup {
    pub axis: Axis,
    /// The `φᶻ` that accompanies the entangling pulse.
    pub phi_z0: f64,
    pub couplings: ExchangeCouplings,
}

impl ProtocolSetup {
    pub fn new(axis: Axis, phi_z0: f64, couplings: ExchangeCouplings) -> Self {
        Self { axis, phi_z0, couplings }
    }
}

impl Default for ProtocolSetup {
    fn default() -> Self {
        Self { axis: Axis::Z, phi_z0: 0.0, couplings: ExchangeCouplings::xy(1.0) }
    }
}

pub(crate) fn require_single_qubit(psi: &crate::qstate::StateVector) -> Result<(), ProtocolError> {
    match psi.num_qubits() {
        1 => Ok(()),
        n => Err(ProtocolError::NotSingleQubit(n)),
    }
}
