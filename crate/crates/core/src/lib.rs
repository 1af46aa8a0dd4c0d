//! Measurement-based gate teleportation for exchange-coupled spin qubits.
//!
//! The crate simulates the single-spin `R_β = exp(i(π/4)σ^β)` gates that are
//! produced by cooling, two-spin measurements and exchange pulses, instead of
//! being driven directly. It also compiles arbitrary single-qubit rotations into
//! sequences of exchange pulses and `R` gates.
//!
//! * [`qstate`]: dense state vectors and unitaries.
//! * [`exchange`]: exchange couplings, pulses, eigensystem, `R` gates.
//! * [`observables`]: projective measurements, sampling and exact branching.
//! * [`protocols`]: the teleportation protocols and their exact outcome trees.
//! * [`universality`]: step-counted synthesis of single-qubit rotations.
//! * [`harness`]: Monte Carlo campaigns and reports.

pub mod exchange;
pub mod harness;
pub mod observables;
pub mod protocols;
pub mod qstate;
pub mod universality;

pub use exchange::{exchange_unitary, r_gate, Axis, ExchangeCouplings, ExchangeModel, ExchangePulse};
pub use harness::{ExperimentConfig, HarnessError, Report, Verdict};
pub use observables::{measure_branches, measure_sample, BranchNode, MeasurementRecord, ObservableKind, ProjectiveObservable};
pub use protocols::{Applied, CorrectionMode, DriverPolicy, ProtocolError, ProtocolSetup};
pub use qstate::{Amplitude, Matrix, StateVector, UnitaryMatrix};
pub use universality::{ElementaryStep, GateSequence};
