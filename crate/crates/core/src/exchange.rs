//! Axially symmetric exchange couplings `J⊥(XX + YY) + Jᶻ ZZ`, the two-spin
//! pulse they generate, and the single-spin `R` gates.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{gates, Matrix, StateVector, UnitaryMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExchangeError {
    #[error("pulse endpoints must differ (got {0} and {0})")]
    SameQubit(usize),
    #[error("inconsistent couplings for {model:?}: j_perp = {j_perp}, j_z = {j_z}")]
    InconsistentCouplings { model: ExchangeModel, j_perp: f64, j_z: f64 },
    #[error("ground space is not the singlet for j_perp = {j_perp}, j_z = {j_z} (need j_perp > 0 and j_perp > -j_z)")]
    NoSingletGround { j_perp: f64, j_z: f64 },
    #[error("a pure-J⊥ pulse is unavailable for the {0:?} model")]
    NoPurePerpPulse(ExchangeModel),
}

/// Which exchange family a device realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeModel {
    /// `Jᶻ = 0`.
    Xy,
    /// `Jᶻ ≠ 0`; `tunable_jz` says whether `Jᶻ` can be switched off independently.
    Xxz { tunable_jz: bool },
    /// `Jᶻ = J⊥`.
    Heisenberg,
}

impl ExchangeModel {
    /// True when a pulse with `φᶻ = 0` and arbitrary `φ⊥` can be produced.
    pub fn has_pure_perp_pulse(self) -> bool {
        matches!(self, ExchangeModel::Xy | ExchangeModel::Xxz { tunable_jz: true })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeCouplings {
    j_perp: f64,
    j_z: f64,
    model: ExchangeModel,
}

impl ExchangeCouplings {
    pub fn new(j_perp: f64, j_z: f64, model: ExchangeModel) -> Result<Self, ExchangeError> {
        let consistent = j_perp.is_finite()
            && j_z.is_finite()
            && match model {
                ExchangeModel::Xy => j_z == 0.0,
                ExchangeModel::Heisenberg => j_z == j_perp,
                ExchangeModel::Xxz { .. } => true,
            };
        if !consistent {
            return Err(ExchangeError::InconsistentCouplings { model, j_perp, j_z });
        }
        Ok(Self { j_perp, j_z, model })
    }

    pub fn xy(j_perp: f64) -> Self {
        Self { j_perp, j_z: 0.0, model: ExchangeModel::Xy }
    }

    pub fn heisenberg(j: f64) -> Self {
        Self { j_perp: j, j_z: j, model: ExchangeModel::Heisenberg }
    }

    pub fn xxz(j_perp: f64, j_z: f64, tunable_jz: bool) -> Self {
        Self { j_perp, j_z, model: ExchangeModel::Xxz { tunable_jz } }
    }

    pub fn j_perp(&self) -> f64 {
        self.j_perp
    }

    pub fn j_z(&self) -> f64 {
        self.j_z
    }

    pub fn model(&self) -> ExchangeModel {
        self.model
    }

    /// The 4×4 Hamiltonian on a pair.
    pub fn hamiltonian(&self) -> Matrix {
        let x = gates::pauli_x();
        let y = gates::pauli_y();
        let z = gates::pauli_z();
        let xx = x.kron(&x);
        let yy = y.kron(&y);
        let zz = z.kron(&z);
        xx.matrix().add(yy.matrix()).scale(Complex64::new(self.j_perp, 0.0)).add(&zz.matrix().scale(Complex64::new(self.j_z, 0.0)))
    }
}

/// A pulse on spins `i`, `j` with integrated couplings `φ⊥ = ∫J⊥dt`,
/// `φᶻ = ∫Jᶻdt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangePulse {
    pub i: usize,
    pub j: usize,
    pub phi_perp: f64,
    pub phi_z: f64,
}

impl ExchangePulse {
    pub fn new(i: usize, j: usize, phi_perp: f64, phi_z: f64) -> Result<Self, ExchangeError> {
        if i == j {
            return Err(ExchangeError::SameQubit(i));
        }
        Ok(Self { i, j, phi_perp, phi_z })
    }

    pub fn unitary(&self) -> UnitaryMatrix {
        exchange_unitary(self.phi_perp, self.phi_z)
    }

    pub fn targets(&self) -> [usize; 2] {
        [self.i, self.j]
    }
}

/// `exp(−i[φ⊥(XX + YY) + φᶻ ZZ])` in closed form:
///
/// ```text
/// ⎡ e^{−iφᶻ}                                            ⎤
/// ⎢        e^{iφᶻ}cos2φ⊥   −i e^{iφᶻ}sin2φ⊥              ⎥
/// ⎢       −i e^{iφᶻ}sin2φ⊥   e^{iφᶻ}cos2φ⊥               ⎥
/// ⎣                                            e^{−iφᶻ} ⎦
/// ```
pub fn exchange_unitary(phi_perp: f64, phi_z: f64) -> UnitaryMatrix {
    let outer = Complex64::from_polar(1.0, -phi_z);
    let inner = Complex64::from_polar(1.0, phi_z);
    let cos = inner * (2.0 * phi_perp).cos();
    let sin = inner * Complex64::new(0.0, -(2.0 * phi_perp).sin());
    let zero = Complex64::new(0.0, 0.0);
    UnitaryMatrix::new_unchecked(Matrix::from_rows([
        [outer, zero, zero, zero],
        [zero, cos, sin, zero],
        [zero, sin, cos, zero],
        [zero, zero, zero, outer],
    ]))
}

/// Canonical labels for the exchange eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairState {
    Singlet,
    Triplet0,
    Up,
    Down,
}

impl PairState {
    pub fn state(self) -> StateVector {
        match self {
            PairState::Singlet => StateVector::singlet(),
            PairState::Triplet0 => StateVector::triplet0(),
            PairState::Up => StateVector::from_label("00").expect("valid label"),
            PairState::Down => StateVector::from_label("11").expect("valid label"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub label: PairState,
    pub state: StateVector,
}

/// Eigenpairs of the exchange Hamiltonian in ascending energy; ties keep the
/// order singlet, T₀, |00⟩, |11⟩.
pub fn exchange_eigensystem(c: &ExchangeCouplings) -> Vec<Eigenpair> {
    let (jp, jz) = (c.j_perp, c.j_z);
    let mut pairs: Vec<Eigenpair> =
        [(-2.0 * jp - jz, PairState::Singlet), (2.0 * jp - jz, PairState::Triplet0), (jz, PairState::Up), (jz, PairState::Down)]
            .into_iter()
            .map(|(energy, label)| Eigenpair { energy, label, state: label.state() })
            .collect();
    // stable sort keeps the canonical order among degenerate levels
    pairs.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    pairs
}

/// Ideal cooling of a pair into its ground state, which must be the singlet.
pub fn cool_to_singlet(c: &ExchangeCouplings) -> Result<StateVector, ExchangeError> {
    if c.j_perp > 0.0 && c.j_perp > -c.j_z {
        Ok(StateVector::singlet())
    } else {
        Err(ExchangeError::NoSingletGround { j_perp: c.j_perp, j_z: c.j_z })
    }
}

/// `U(π/4 − φ₀ᶻ, φ₀ᶻ)`: entangles `|+−⟩` into `(|+−⟩ − i|−+⟩)/√2` up to phase.
pub fn x_subspace_pulse(phi_z0: f64) -> UnitaryMatrix {
    exchange_unitary(FRAC_PI_4 - phi_z0, phi_z0)
}

/// `U(π/8, φ₀ᶻ)`: entangles `|01⟩` into `(|01⟩ − i|10⟩)/√2` up to phase.
pub fn z_subspace_pulse(phi_z0: f64) -> UnitaryMatrix {
    exchange_unitary(FRAC_PI_8, phi_z0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub fn pauli(self) -> UnitaryMatrix {
        match self {
            Axis::X => gates::pauli_x(),
            Axis::Z => gates::pauli_z(),
        }
    }

    /// The single-qubit eigenbasis `(+1 eigenstate, −1 eigenstate)`.
    pub fn eigenbasis(self) -> (StateVector, StateVector) {
        match self {
            Axis::X => (StateVector::plus(), StateVector::minus()),
            Axis::Z => (StateVector::zero(), StateVector::one()),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Z => "z",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(format!("unknown axis {other:?} (expected x or z)")),
        }
    }
}

/// `R_β = exp(i(π/4)σ^β)`, or its adjoint.
pub fn r_gate(axis: Axis, dagger: bool) -> UnitaryMatrix {
    let theta = if dagger { FRAC_PI_4 } else { -FRAC_PI_4 };
    gates::pauli_exp(theta, &axis.pauli())
}

/// d-wave grain-boundary qubit parameters with the bias switched off:
/// `H = Σ Δᵢ Xᵢ + Σ J_ij Zᵢ Zⱼ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgbParameters {
    pub delta: Vec<f64>,
    pub josephson: Vec<(usize, usize, f64)>,
}

impl DgbParameters {
    pub fn new(delta: Vec<f64>, josephson: Vec<(usize, usize, f64)>) -> Result<Self, ExchangeError> {
        for &(i, j, _) in &josephson {
            if i == j {
                return Err(ExchangeError::SameQubit(i));
            }
        }
        Ok(Self { delta, josephson })
    }

    pub fn num_qubits(&self) -> usize {
        let from_pairs = self.josephson.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        self.delta.len().max(from_pairs)
    }

    /// Local biases; always zero for this device class.
    pub fn bias(&self) -> Vec<f64> {
        vec![0.0; self.num_qubits()]
    }

    /// The Hamiltonian on the full register.
    pub fn hamiltonian(&self) -> Matrix {
        let n = self.num_qubits();
        let dim = 1 << n;
        let mut h = Matrix::zeros(dim);
        let embed = |ops: &[(usize, UnitaryMatrix)]| {
            let mut full = Matrix::identity(1);
            for q in 0..n {
                let local = ops.iter().find(|(t, _)| *t == q).map(|(_, u)| u.matrix().clone()).unwrap_or_else(|| Matrix::identity(2));
                full = full.kron(&local);
            }
            full
        };
        for (q, &d) in self.delta.iter().enumerate() {
            h = h.add(&embed(&[(q, gates::pauli_x())]).scale(Complex64::new(d, 0.0)));
        }
        for &(i, j, jij) in &self.josephson {
            h = h.add(&embed(&[(i, gates::pauli_z()), (j, gates::pauli_z())]).scale(Complex64::new(jij, 0.0)));
        }
        h
    }

    /// Ancilla prepared by cooling in the idle state, taken as `(|0⟩ + |1⟩)/√2`.
    pub fn idle_ancilla(&self) -> StateVector {
        StateVector::plus()
    }
}

/// Josephson gate `exp(−i(φ/2) Z⊗Z)`, which is the exchange pulse `U(0, φ/2)`.
pub fn josephson_gate(phi: f64) -> UnitaryMatrix {
    exchange_unitary(0.0, phi / 2.0)
}
