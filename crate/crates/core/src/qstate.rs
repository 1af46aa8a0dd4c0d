//! Dense state vectors for a handful of spin-1/2 systems.
//!
//! Basis index convention: qubit 0 is the most significant bit, so a ket
//! written `|q0 q1 q2⟩` reads left to right as the binary index. States are
//! values; every operation returns a new state.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Amplitude = Complex64;

/// Largest register this crate will build.
pub const MAX_QUBITS: usize = 8;
/// Normalization tolerance maintained by every public operation.
pub const NORM_TOL: f64 = 1e-12;
/// Default tolerance for state and matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("qubit count {0} outside 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("amplitudes have zero norm")]
    ZeroNorm,
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    OutOfRange { qubit: usize, n: usize },
    #[error("matrix is not unitary (max |U†U − I| = {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not square with a power-of-two dimension")]
    BadShape,
    #[error("invalid basis label {0:?}")]
    BadLabel(String),
    #[error("qubit {0} is entangled with the rest of the register")]
    Entangled(usize),
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds from row-major data; `data.len()` must be a perfect square.
    pub fn from_vec(data: Vec<Complex64>) -> Result<Self, StateError> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(StateError::BadShape);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self { dim: N, data: rows.iter().flatten().copied().collect() }
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Self {
        let dim = a.amps.len();
        assert_eq!(dim, b.amps.len(), "outer product of mismatched states");
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = a.amps[r] * b.amps[c].conj();
            }
        }
        m
    }

    /// `|s⟩⟨s|`.
    pub fn projector(s: &StateVector) -> Self {
        Self::outer(s, s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits this matrix acts on, if the dimension is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn kron(&self, other: &Matrix) -> Self {
        let dim = self.dim * other.dim;
        let mut m = Self::zeros(dim);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self[(r1, c1)];
                if a == ZERO {
                    continue;
                }
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        m[(r1 * other.dim + r2, c1 * other.dim + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        m
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    /// `max |self − e^{iθ}·other|` with θ aligning the two matrices (the
    /// phase of `tr(other†·self)`).
    pub fn phase_residual(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let overlap: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| b.conj() * a).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.max_abs_diff(&other.scale(phase))
    }

    pub fn approx_eq_up_to_phase(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.phase_residual(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.dagger(), tol)
    }

    /// `max |M†M − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.dagger() * self).max_abs_diff(&Matrix::identity(self.dim))
    }

    pub fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum()).collect()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    m.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        m
    }
}

/// A matrix checked to satisfy `U†U = I` within [`DEFAULT_TOL`] and to act on
/// a whole number of qubits.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct UnitaryMatrix(Matrix);

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary{:?}", self.0)
    }
}

impl TryFrom<Matrix> for UnitaryMatrix {
    type Error = StateError;
    fn try_from(m: Matrix) -> Result<Self, StateError> {
        UnitaryMatrix::new(m)
    }
}

impl From<UnitaryMatrix> for Matrix {
    fn from(u: UnitaryMatrix) -> Matrix {
        u.0
    }
}

impl UnitaryMatrix {
    pub fn new(m: Matrix) -> Result<Self, StateError> {
        if m.num_qubits().is_none() {
            return Err(StateError::BadShape);
        }
        let residual = m.unitarity_residual();
        if residual > DEFAULT_TOL {
            return Err(StateError::NotUnitary(residual));
        }
        Ok(Self(m))
    }

    /// For matrices that are unitary by construction (closed-form gates).
    pub(crate) fn new_unchecked(m: Matrix) -> Self {
        debug_assert!(m.unitarity_residual() < 1e-9, "not unitary: {m:?}");
        Self(m)
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self(Matrix::identity(1 << num_qubits))
    }

    /// This gate acting on `targets` of an `n`-qubit register, identity elsewhere.
    pub fn embed(&self, targets: &[usize], n: usize) -> Result<Self, StateError> {
        let dim = 1usize << n;
        let mut m = Matrix::zeros(dim);
        for col in 0..dim {
            let image = StateVector::basis(n, col)?.apply_matrix_raw(targets, &self.0)?;
            for (row, z) in image.into_iter().enumerate() {
                m[(row, col)] = z;
            }
        }
        Ok(Self(m))
    }

    /// Haar-random unitary on `num_qubits` qubits (Gram-Schmidt on a complex
    /// Gaussian matrix).
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << num_qubits;
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while cols.len() < dim {
            let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        let mut m = Matrix::zeros(dim);
        for (c, col) in cols.iter().enumerate() {
            for (r, &z) in col.iter().enumerate() {
                m[(r, c)] = z;
            }
        }
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.0.dim.trailing_zeros() as usize
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.dagger())
    }

    pub fn kron(&self, other: &UnitaryMatrix) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn scale_phase(&self, theta: f64) -> Self {
        Self(self.0.scale(Complex64::from_polar(1.0, theta)))
    }

    pub fn approx_eq(&self, other: &UnitaryMatrix, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    pub fn approx_eq_up_to_phase(&self, other: &UnitaryMatrix, tol: f64) -> bool {
        self.0.approx_eq_up_to_phase(&other.0, tol)
    }

    pub fn phase_residual(&self, other: &UnitaryMatrix) -> f64 {
        self.0.phase_residual(&other.0)
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;
    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(&self.0 * &rhs.0)
    }
}

impl Mul<&StateVector> for &UnitaryMatrix {
    type Output = StateVector;

    /// Applies the unitary to a whole register of matching size.
    fn mul(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.amps.len(), "unitary and state sizes differ");
        StateVector { n: rhs.n, amps: self.0.apply_to(&rhs.amps) }
    }
}

/// Pauli matrices and a few standard single-qubit gates.
pub mod gates {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn identity() -> UnitaryMatrix {
        UnitaryMatrix::identity(1)
    }

    pub fn pauli_x() -> UnitaryMatrix {
        UnitaryMatrix(Matrix::from_rows([[ZERO, ONE], [ONE, ZERO]]))
    }

    pub fn pauli_y() -> UnitaryMatrix {
        UnitaryMatrix(Matrix::from_rows([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]))
    }

    pub fn pauli_z() -> UnitaryMatrix {
        UnitaryMatrix(Matrix::diagonal(&[ONE, -ONE]))
    }

    pub fn hadamard() -> UnitaryMatrix {
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        UnitaryMatrix(Matrix::from_rows([[h, h], [h, -h]]))
    }

    pub fn phase_s() -> UnitaryMatrix {
        UnitaryMatrix(Matrix::diagonal(&[ONE, c(0.0, 1.0)]))
    }

    pub fn phase_t() -> UnitaryMatrix {
        UnitaryMatrix(Matrix::diagonal(&[ONE, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]))
    }

    /// `exp(−iθP)` for an involutory Pauli product `P` (`P² = I`).
    pub fn pauli_exp(theta: f64, pauli: &UnitaryMatrix) -> UnitaryMatrix {
        let id = Matrix::identity(pauli.dim());
        let m = id.scale(c(theta.cos(), 0.0)).add(&pauli.matrix().scale(c(0.0, -theta.sin())));
        UnitaryMatrix::new_unchecked(m)
    }

    /// The four Pauli matrices indexed I, X, Y, Z.
    pub fn paulis() -> [UnitaryMatrix; 4] {
        [identity(), pauli_x(), pauli_y(), pauli_z()]
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized pure state of `n` qubits.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector[")?;
        let mut first = true;
        for (i, z) in self.amps.iter().enumerate() {
            if z.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "({:+.4}{:+.4}i)|{:0width$b}⟩", z.re, z.im, i, width = self.n)?;
        }
        write!(f, "]")
    }
}

impl StateVector {
    /// Normalizes `amps` into an `n`-qubit state.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self, StateError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(StateError::QubitCount(n));
        }
        if amps.len() != 1 << n {
            return Err(StateError::Length { expected: 1 << n, got: amps.len() });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= NORM_TOL {
            return Err(StateError::ZeroNorm);
        }
        Ok(Self { n, amps: amps.into_iter().map(|z| z / norm).collect() })
    }

    /// Builds from real-and-imaginary pairs.
    pub fn from_pairs(n: usize, pairs: &[(f64, f64)]) -> Result<Self, StateError> {
        Self::new(n, pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, StateError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(StateError::QubitCount(n));
        }
        if index >= 1 << n {
            return Err(StateError::BadLabel(format!("index {index}")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { n, amps })
    }

    /// Product state from a label over `{0, 1, +, -}`, e.g. `"0+1"`.
    pub fn from_label(label: &str) -> Result<Self, StateError> {
        let mut state: Option<StateVector> = None;
        for ch in label.chars() {
            let single = match ch {
                '0' => Self::zero(),
                '1' => Self::one(),
                '+' => Self::plus(),
                '-' => Self::minus(),
                _ => return Err(StateError::BadLabel(label.to_string())),
            };
            state = Some(match state {
                None => single,
                Some(s) => s.tensor(&single)?,
            });
        }
        state.ok_or_else(|| StateError::BadLabel(label.to_string()))
    }

    pub fn zero() -> Self {
        Self { n: 1, amps: vec![ONE, ZERO] }
    }

    pub fn one() -> Self {
        Self { n: 1, amps: vec![ZERO, ONE] }
    }

    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n: 1, amps: vec![h, h] }
    }

    pub fn minus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n: 1, amps: vec![h, -h] }
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n: 2, amps: vec![ZERO, h, -h, ZERO] }
    }

    /// `(|01⟩ + |10⟩)/√2`.
    pub fn triplet0() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n: 2, amps: vec![ZERO, h, h, ZERO] }
    }

    /// `(|+−⟩ + |−+⟩)/√2 = (|00⟩ − |11⟩)/√2`.
    pub fn triplet0_x() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n: 2, amps: vec![h, ZERO, ZERO, -h] }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n: 2, amps: vec![h, ZERO, ZERO, h] }
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
            if let Ok(s) = Self::new(n, amps) {
                return s;
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), StateError> {
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(StateError::OutOfRange { qubit: t, n: self.n });
            }
            if targets[..k].contains(&t) {
                return Err(StateError::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Applies an arbitrary matrix on `targets` without renormalizing.
    pub(crate) fn apply_matrix_raw(&self, targets: &[usize], m: &Matrix) -> Result<Vec<Complex64>, StateError> {
        self.check_targets(targets)?;
        let k = targets.len();
        if m.dim() != 1 << k {
            return Err(StateError::DimensionMismatch(format!("{}x{} matrix on {} target qubit(s)", m.dim(), m.dim(), k)));
        }
        // Bit masks for each target; the first target is the most significant
        // bit of the matrix's basis.
        let masks: Vec<usize> = targets.iter().map(|&t| 1 << (self.n - 1 - t)).collect();
        let all: usize = masks.iter().sum();
        let sub_dim = 1 << k;
        let offsets: Vec<usize> = (0..sub_dim)
            .map(|sub| masks.iter().enumerate().filter(|(i, _)| sub >> (k - 1 - i) & 1 == 1).map(|(_, &mask)| mask).sum())
            .collect();
        let mut out = vec![ZERO; self.amps.len()];
        let mut gathered = vec![ZERO; sub_dim];
        for base in (0..self.amps.len()).filter(|i| i & all == 0) {
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                out[base | off] = (0..sub_dim).map(|col| m[(row, col)] * gathered[col]).sum();
            }
        }
        Ok(out)
    }

    /// Applies `u` on `targets` (first target = most significant bit of `u`'s
    /// basis), identity elsewhere.
    pub fn apply(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<Self, StateError> {
        let amps = self.apply_matrix_raw(targets, u.matrix())?;
        // Unitaries preserve the norm; renormalize only to shed rounding drift.
        Self::new(self.n, amps)
    }

    pub fn tensor(&self, other: &StateVector) -> Result<Self, StateError> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(StateError::QubitCount(n));
        }
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Ok(Self { n, amps })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, StateError> {
        if self.n != other.n {
            return Err(StateError::DimensionMismatch(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, StateError> {
        Ok(self.inner(other)?.norm())
    }

    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool, StateError> {
        Ok(self.fidelity(other)? >= 1.0 - tol)
    }

    /// Entrywise comparison, phase included.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.n == other.n && self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// The state multiplied by `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let p = Complex64::from_polar(1.0, theta);
        Self { n: self.n, amps: self.amps.iter().map(|z| z * p).collect() }
    }

    /// Reduced density matrix of one qubit, `[[ρ00, ρ01], [ρ10, ρ11]]`.
    pub fn reduced_density(&self, qubit: usize) -> Result<[[Complex64; 2]; 2], StateError> {
        self.check_targets(&[qubit])?;
        let mask = 1 << (self.n - 1 - qubit);
        let mut rho = [[ZERO; 2]; 2];
        for base in (0..self.amps.len()).filter(|i| i & mask == 0) {
            let a0 = self.amps[base];
            let a1 = self.amps[base | mask];
            rho[0][0] += a0 * a0.conj();
            rho[0][1] += a0 * a1.conj();
            rho[1][0] += a1 * a0.conj();
            rho[1][1] += a1 * a1.conj();
        }
        Ok(rho)
    }

    /// `⟨t|ρ_q|t⟩^{1/2}` for a single-qubit target `t`; equals `|⟨t|φ⟩|` when
    /// qubit `q` is in the pure state `φ`.
    pub fn qubit_fidelity(&self, qubit: usize, target: &StateVector) -> Result<f64, StateError> {
        if target.n != 1 {
            return Err(StateError::DimensionMismatch("target must be a single qubit".into()));
        }
        let rho = self.reduced_density(qubit)?;
        let t = &target.amps;
        let mut overlap = ZERO;
        for r in 0..2 {
            for c in 0..2 {
                overlap += t[r].conj() * rho[r][c] * t[c];
            }
        }
        Ok(overlap.re.max(0.0).sqrt())
    }

    /// Splits a product state into `(qubit state, rest)`; both factors are
    /// determined up to a global phase. Fails if the qubit is entangled beyond
    /// `tol` (purity deficit).
    pub fn factor_out(&self, qubit: usize, tol: f64) -> Result<(StateVector, Option<StateVector>), StateError> {
        let rho = self.reduced_density(qubit)?;
        let purity = (rho[0][0] * rho[0][0] + rho[0][1] * rho[1][0] + rho[1][0] * rho[0][1] + rho[1][1] * rho[1][1]).re;
        if purity < 1.0 - tol {
            return Err(StateError::Entangled(qubit));
        }
        let mask = 1 << (self.n - 1 - qubit);
        // The rest-configuration with the largest weight fixes the qubit's state.
        let base = (0..self.amps.len())
            .filter(|i| i & mask == 0)
            .max_by(|&a, &b| {
                let wa = self.amps[a].norm_sqr() + self.amps[a | mask].norm_sqr();
                let wb = self.amps[b].norm_sqr() + self.amps[b | mask].norm_sqr();
                wa.total_cmp(&wb)
            })
            .expect("register has at least one qubit");
        let single = Self::new(1, vec![self.amps[base], self.amps[base | mask]])?;
        if self.n == 1 {
            return Ok((single, None));
        }
        // rest_j = Σ_b conj(single_b) · amp(j with qubit = b)
        let rest_amps: Vec<Complex64> = (0..self.amps.len())
            .filter(|i| i & mask == 0)
            .map(|i| single.amps[0].conj() * self.amps[i] + single.amps[1].conj() * self.amps[i | mask])
            .collect();
        let rest = Self::new(self.n - 1, rest_amps)?;
        Ok((single, Some(rest)))
    }

    /// The single-qubit state of `qubit`, assuming the register is a product
    /// across that qubit.
    pub fn qubit_state(&self, qubit: usize, tol: f64) -> Result<StateVector, StateError> {
        Ok(self.factor_out(qubit, tol)?.0)
    }
}

impl Mul<&StateVector> for &Matrix {
    type Output = Vec<Complex64>;
    fn mul(self, rhs: &StateVector) -> Vec<Complex64> {
        self.apply_to(&rhs.amps)
    }
}
