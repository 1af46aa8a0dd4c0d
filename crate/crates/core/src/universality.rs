//! Compiling single-qubit rotations into exchange pulses and `R` gates.
//!
//! Sequences are in time order: the first step acts first. All constructions
//! work on spins 0 (target) and 1 (helper) and take the pulses' `φᶻ` as an
//! input; the result does not depend on it.
//!
//! | builder             | operator          | steps |
//! |---------------------|-------------------|-------|
//! | [`build_xx`]        | `e^{−iφX₀X₁}`     | 6     |
//! | [`build_yx`]        | `e^{−iφY₀X₁}`     | 8     |
//! | [`build_z_rotation`]| `e^{−iφZ₀}`       | 22    |
//! | [`build_y_rotation`]| `e^{−iφY₀}`       | 22    |

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exchange::{r_gate, Axis, ExchangeError, ExchangePulse};
use crate::qstate::{gates, StateError, UnitaryMatrix};

/// Angles below this are treated as zero when eliding Euler factors.
pub const ELIDE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error("step acts on qubit {qubit} but the register has {n}")]
    OutOfRange { qubit: usize, n: usize },
    #[error("target must be a single-qubit unitary, got dimension {0}")]
    NotSingleQubit(usize),
}

/// One unit of cost: an exchange pulse or an `R_β^{(†)}` gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementaryStep {
    Exchange(ExchangePulse),
    RGate { qubit: usize, axis: Axis, dagger: bool },
}

impl ElementaryStep {
    pub fn r(qubit: usize, axis: Axis, dagger: bool) -> Self {
        ElementaryStep::RGate { qubit, axis, dagger }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            ElementaryStep::Exchange(p) => p.targets().to_vec(),
            ElementaryStep::RGate { qubit, .. } => vec![*qubit],
        }
    }

    pub fn unitary(&self) -> UnitaryMatrix {
        match self {
            ElementaryStep::Exchange(p) => p.unitary(),
            ElementaryStep::RGate { axis, dagger, .. } => r_gate(*axis, *dagger),
        }
    }

    /// Exact inverse. Pulses invert by negating both angles.
    pub fn inverse(&self) -> Self {
        match *self {
            ElementaryStep::Exchange(p) => ElementaryStep::Exchange(ExchangePulse { phi_perp: -p.phi_perp, phi_z: -p.phi_z, ..p }),
            ElementaryStep::RGate { qubit, axis, dagger } => ElementaryStep::RGate { qubit, axis, dagger: !dagger },
        }
    }
}

impl fmt::Display for ElementaryStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryStep::Exchange(p) => write!(f, "U[{},{}]({:.6}, {:.6})", p.i, p.j, p.phi_perp, p.phi_z),
            ElementaryStep::RGate { qubit, axis, dagger } => write!(f, "R[{qubit}]{axis}{}", if *dagger { "+" } else { "" }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GateSequence {
    pub steps: Vec<ElementaryStep>,
    pub declared_target: String,
}

impl GateSequence {
    pub fn new(steps: Vec<ElementaryStep>, declared_target: impl Into<String>) -> Self {
        Self { steps, declared_target: declared_target.into() }
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps in reverse order, each inverted.
    pub fn inverse(&self) -> Self {
        Self {
            steps: self.steps.iter().rev().map(ElementaryStep::inverse).collect(),
            declared_target: format!("inverse of {}", self.declared_target),
        }
    }

    fn then(mut self, other: GateSequence) -> Self {
        self.steps.extend(other.steps);
        self
    }

    fn relabel(mut self, target: impl Into<String>) -> Self {
        self.declared_target = target.into();
        self
    }
}

/// Product of all steps on an `n`-qubit register.
pub fn evaluate(seq: &GateSequence, n: usize) -> Result<UnitaryMatrix, CompileError> {
    let mut total = UnitaryMatrix::identity(n);
    for step in &seq.steps {
        if let Some(&qubit) = step.qubits().iter().find(|&&q| q >= n) {
            return Err(CompileError::OutOfRange { qubit, n });
        }
        total = &step.unitary().embed(&step.qubits(), n)? * &total;
    }
    Ok(total)
}

/// `e^{−iθA}·body·e^{+iθA}` from a sequence `a_seq` realizing `e^{+iθA}`.
pub fn conjugate(a_seq: &GateSequence, body: &GateSequence) -> GateSequence {
    let target = format!("C[{}] o {}", a_seq.declared_target, body.declared_target);
    a_seq.clone().then(body.clone()).then(a_seq.inverse()).relabel(target)
}

fn pulse(phi_perp: f64, phi_z: f64) -> ElementaryStep {
    ElementaryStep::Exchange(ExchangePulse { i: 0, j: 1, phi_perp, phi_z })
}

fn wrap(first: GateSequence, body: GateSequence, last: GateSequence, target: String) -> GateSequence {
    first.then(body).then(last).relabel(target)
}

/// `e^{−iφX₀X₁}`: two half pulses around `e^{±i(π/2)X₀} = R_x^{±2}`.
pub fn build_xx(phi: f64, phi_z: f64) -> GateSequence {
    let half = pulse(phi / 2.0, phi_z);
    let r = ElementaryStep::r(0, Axis::X, false);
    let rd = ElementaryStep::r(0, Axis::X, true);
    GateSequence::new(vec![half, r, r, half, rd, rd], format!("exp(-i*{phi}*X0X1)"))
}

/// `e^{−iφY₀X₁}`: [`build_xx`] conjugated by `R_z` on spin 0.
pub fn build_yx(phi: f64, phi_z: f64) -> GateSequence {
    let rz = GateSequence::new(vec![ElementaryStep::r(0, Axis::Z, false)], "R0z");
    conjugate(&rz, &build_xx(phi, phi_z)).relabel(format!("exp(-i*{phi}*Y0X1)"))
}

/// `e^{−iφZ₀}`: [`build_xx`] between `e^{∓i(π/4)Y₀X₁}` wings.
pub fn build_z_rotation(phi: f64, phi_z: f64) -> GateSequence {
    wrap(build_yx(FRAC_PI_4, phi_z), build_xx(phi, phi_z), build_yx(-FRAC_PI_4, phi_z), format!("exp(-i*{phi}*Z0)"))
}

/// `e^{−iφY₀}`: [`build_yx`] between `e^{±i(π/4)X₀X₁}` wings, then `R_x^{∓1}`.
pub fn build_y_rotation(phi: f64, phi_z: f64) -> GateSequence {
    let inner = wrap(build_xx(-FRAC_PI_4, phi_z), build_yx(phi, phi_z), build_xx(FRAC_PI_4, phi_z), String::new());
    let rx = |dagger| GateSequence::new(vec![ElementaryStep::r(0, Axis::X, dagger)], "");
    wrap(rx(true), inner, rx(false), format!("exp(-i*{phi}*Y0)"))
}

/// ZYZ angles with `U ≐ e^{−iαZ}e^{−iβY}e^{−iγZ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn unitary(&self) -> UnitaryMatrix {
        let z = gates::pauli_z();
        let y = gates::pauli_y();
        let a = gates::pauli_exp(self.alpha, &z);
        let b = gates::pauli_exp(self.beta, &y);
        let g = gates::pauli_exp(self.gamma, &z);
        &(&a * &b) * &g
    }
}

/// Maps an angle into `(−π/2, π/2]`; a shift by π is a global sign.
fn fold_half_turn(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(PI);
    if t > FRAC_PI_2 {
        t -= PI;
    }
    t
}

pub fn euler_angles(u: &UnitaryMatrix) -> Result<EulerAngles, CompileError> {
    if u.dim() != 2 {
        return Err(CompileError::NotSingleQubit(u.dim()));
    }
    let m = u.matrix();
    let (v00, v01, v10, v11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let beta = v10.norm().atan2(v00.norm());
    // Each phase difference fixes one combination mod 2π, hence the angle mod π.
    let (alpha, gamma) = if v10.norm() < ELIDE_TOL {
        ((v11 * v00.conj()).arg() / 2.0, 0.0)
    } else if v00.norm() < ELIDE_TOL {
        ((v10 * (-v01).conj()).arg() / 2.0, 0.0)
    } else {
        ((v10 * v00.conj()).arg() / 2.0, (v11 * v10.conj()).arg() / 2.0)
    };
    Ok(EulerAngles { alpha: fold_half_turn(alpha), beta, gamma: fold_half_turn(gamma) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Synthesis {
    pub angles: EulerAngles,
    pub sequence: GateSequence,
    /// Euler factors dropped because their angle vanished.
    pub elided: Vec<&'static str>,
    /// `min_θ ‖evaluate(seq) − e^{iθ}·(U ⊗ I)‖_max`.
    pub residual: f64,
}

type Builder = fn(f64, f64) -> GateSequence;

/// Compiles a single-qubit unitary into elementary steps on spins 0 and 1.
pub fn euler_synthesize(u: &UnitaryMatrix, phi_z: f64) -> Result<Synthesis, CompileError> {
    let angles = euler_angles(u)?;
    let mut sequence = GateSequence::new(Vec::new(), "");
    let mut elided = Vec::new();
    let factors: [(&'static str, f64, Builder); 3] =
        [("gamma", angles.gamma, build_z_rotation), ("beta", angles.beta, build_y_rotation), ("alpha", angles.alpha, build_z_rotation)];
    for (name, angle, builder) in factors {
        if angle.abs() < ELIDE_TOL {
            elided.push(name);
        } else {
            sequence = sequence.then(builder(angle, phi_z));
        }
    }
    sequence.declared_target = "euler zyz".into();
    let residual = sequence_residual(&sequence, u)?;
    Ok(Synthesis { angles, sequence, elided, residual })
}

/// Distance of a two-spin sequence from `U` on spin 0, up to global phase.
pub fn sequence_residual(seq: &GateSequence, u: &UnitaryMatrix) -> Result<f64, CompileError> {
    let target = u.kron(&UnitaryMatrix::identity(1));
    Ok(evaluate(seq, 2)?.phase_residual(&target))
}

/// `e^{−iθP}` for a Pauli `P` on spin 0.
pub fn single_qubit_rotation(axis: char, theta: f64) -> Option<UnitaryMatrix> {
    let p = match axis {
        'x' => gates::pauli_x(),
        'y' => gates::pauli_y(),
        'z' => gates::pauli_z(),
        _ => return None,
    };
    Some(gates::pauli_exp(theta, &p))
}
