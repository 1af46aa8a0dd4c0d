//! Projective measurements as explicit projector families.
//!
//! Each observable acts on a small set of target qubits and carries one
//! projector per outcome. Degenerate outcomes keep their full subspace
//! projector, so a rank-3 outcome collapses onto a rank-3 subspace.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{gates, Matrix, StateError, StateVector, DEFAULT_TOL};

/// Outcomes with probability below this are dropped from branch lists.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("custom basis is not orthonormal and complete: {0}")]
    BadBasis(String),
    #[error("observable {label} is not a valid projector family: {reason}")]
    InvalidProjectors { label: String, reason: String },
    #[error("observable acts on qubit {qubit}, register has {n}")]
    OutOfRange { qubit: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub eigenvalue: f64,
    /// Projector on the observable's target qubits.
    pub projector: Matrix,
}

/// The kinds of observable the protocols use.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservableKind {
    PauliZ(usize),
    PauliX(usize),
    /// `σᶻ_i σᶻ_j` with eigenvalues ±1.
    Zz(usize, usize),
    /// `S⃗² = (½(σ⃗_i + σ⃗_j))²`, eigenvalues `S(S+1)` ∈ {0, 2}.
    TotalSpinSq(usize, usize),
    /// `S_z² = ½(I + σᶻ_i σᶻ_j)`.
    SzSq(usize, usize),
    /// `S_x² = ½(I + σˣ_i σˣ_j)`.
    SxSq(usize, usize),
    /// Bell basis `(I⊗σ^α)|Φ⁺⟩`, outcomes labelled I, X, Y, Z.
    BellBasis(usize, usize),
    /// Rank-1 projectors onto a user-supplied orthonormal basis.
    CustomBasis {
        targets: Vec<usize>,
        basis: Vec<(String, StateVector)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveObservable {
    label: String,
    targets: Vec<usize>,
    outcomes: Vec<Outcome>,
}

impl ProjectiveObservable {
    pub fn new(kind: ObservableKind) -> Result<Self, ObservableError> {
        make_observable(kind)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o.label == label)
    }

    /// Checks Hermiticity, idempotence, mutual orthogonality and completeness.
    pub fn validate(&self, tol: f64) -> Result<(), ObservableError> {
        let fail = |reason: String| ObservableError::InvalidProjectors { label: self.label.clone(), reason };
        let dim = 1 << self.targets.len();
        let mut sum = Matrix::zeros(dim);
        for (k, a) in self.outcomes.iter().enumerate() {
            let p = &a.projector;
            if p.dim() != dim {
                return Err(fail(format!("outcome {} has dimension {}", a.label, p.dim())));
            }
            if !p.is_hermitian(tol) {
                return Err(fail(format!("outcome {} is not Hermitian", a.label)));
            }
            if !(p * p).approx_eq(p, tol) {
                return Err(fail(format!("outcome {} is not idempotent", a.label)));
            }
            for b in &self.outcomes[k + 1..] {
                if !(p * &b.projector).approx_eq(&Matrix::zeros(dim), tol) {
                    return Err(fail(format!("outcomes {} and {} overlap", a.label, b.label)));
                }
            }
            sum = sum.add(p);
        }
        if !sum.approx_eq(&Matrix::identity(dim), tol) {
            return Err(fail("projectors do not sum to identity".into()));
        }
        Ok(())
    }

    fn check_register(&self, s: &StateVector) -> Result<(), ObservableError> {
        match self.targets.iter().find(|&&t| t >= s.num_qubits()) {
            Some(&qubit) => Err(ObservableError::OutOfRange { qubit, n: s.num_qubits() }),
            None => Ok(()),
        }
    }

    /// Unnormalized projections and their Born probabilities, in declaration order.
    fn project_all(&self, s: &StateVector) -> Result<Vec<(f64, Vec<num_complex::Complex64>)>, ObservableError> {
        self.check_register(s)?;
        self.outcomes
            .iter()
            .map(|o| {
                let amps = s.apply_matrix_raw(&self.targets, &o.projector)?;
                let p = amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
                Ok((p, amps))
            })
            .collect()
    }
}

fn rank1(states: &[StateVector]) -> Matrix {
    states.iter().map(Matrix::projector).reduce(|a, b| a.add(&b)).expect("at least one state")
}

fn pair_label(name: &str, i: usize, j: usize) -> String {
    format!("{name}({i},{j})")
}

fn two_qubit_parity(
    name: &str,
    i: usize,
    j: usize,
    even: [&str; 2],
    odd: [&str; 2],
    labels: [(&str, f64); 2],
) -> Result<ProjectiveObservable, ObservableError> {
    if i == j {
        return Err(StateError::DuplicateTarget(i).into());
    }
    let states = |ls: [&str; 2]| -> Result<Vec<StateVector>, StateError> { ls.iter().map(|l| StateVector::from_label(l)).collect() };
    Ok(ProjectiveObservable {
        label: pair_label(name, i, j),
        targets: vec![i, j],
        outcomes: vec![
            Outcome { label: labels[0].0.into(), eigenvalue: labels[0].1, projector: rank1(&states(odd)?) },
            Outcome { label: labels[1].0.into(), eigenvalue: labels[1].1, projector: rank1(&states(even)?) },
        ],
    })
}

pub fn make_observable(kind: ObservableKind) -> Result<ProjectiveObservable, ObservableError> {
    let obs = match kind {
        ObservableKind::PauliZ(j) => ProjectiveObservable {
            label: format!("sigma_z({j})"),
            targets: vec![j],
            outcomes: vec![
                Outcome { label: "0".into(), eigenvalue: 1.0, projector: Matrix::projector(&StateVector::zero()) },
                Outcome { label: "1".into(), eigenvalue: -1.0, projector: Matrix::projector(&StateVector::one()) },
            ],
        },
        ObservableKind::PauliX(j) => ProjectiveObservable {
            label: format!("sigma_x({j})"),
            targets: vec![j],
            outcomes: vec![
                Outcome { label: "+".into(), eigenvalue: 1.0, projector: Matrix::projector(&StateVector::plus()) },
                Outcome { label: "-".into(), eigenvalue: -1.0, projector: Matrix::projector(&StateVector::minus()) },
            ],
        },
        ObservableKind::Zz(i, j) => {
            let mut o = two_qubit_parity("zz", i, j, ["00", "11"], ["01", "10"], [("-1", -1.0), ("+1", 1.0)])?;
            // list +1 first, matching the eigenvalue order of σᶻσᶻ on |00⟩
            o.outcomes.reverse();
            o
        }
        ObservableKind::SzSq(i, j) => two_qubit_parity("sz_sq", i, j, ["00", "11"], ["01", "10"], [("0", 0.0), ("1", 1.0)])?,
        ObservableKind::SxSq(i, j) => two_qubit_parity("sx_sq", i, j, ["++", "--"], ["+-", "-+"], [("0", 0.0), ("1", 1.0)])?,
        ObservableKind::TotalSpinSq(i, j) => {
            if i == j {
                return Err(StateError::DuplicateTarget(i).into());
            }
            let singlet = Matrix::projector(&StateVector::singlet());
            let triplet = Matrix::identity(4).sub(&singlet);
            ProjectiveObservable {
                label: pair_label("spin_sq", i, j),
                targets: vec![i, j],
                outcomes: vec![
                    Outcome { label: "S=0".into(), eigenvalue: 0.0, projector: singlet },
                    Outcome { label: "S=1".into(), eigenvalue: 2.0, projector: triplet },
                ],
            }
        }
        ObservableKind::BellBasis(i, j) => {
            if i == j {
                return Err(StateError::DuplicateTarget(i).into());
            }
            let phi = StateVector::bell_phi_plus();
            let outcomes = gates::paulis()
                .iter()
                .zip(["I", "X", "Y", "Z"])
                .enumerate()
                .map(|(k, (p, name))| {
                    let state = phi.apply(p, &[1])?;
                    Ok(Outcome { label: name.into(), eigenvalue: k as f64, projector: Matrix::projector(&state) })
                })
                .collect::<Result<Vec<_>, StateError>>()?;
            ProjectiveObservable { label: pair_label("bell", i, j), targets: vec![i, j], outcomes }
        }
        ObservableKind::CustomBasis { targets, basis } => {
            let dim = 1usize << targets.len();
            if basis.len() != dim {
                return Err(ObservableError::BadBasis(format!("{} states for dimension {dim}", basis.len())));
            }
            for (a, (la, sa)) in basis.iter().enumerate() {
                if sa.num_qubits() != targets.len() {
                    return Err(ObservableError::BadBasis(format!("state {la} has {} qubits", sa.num_qubits())));
                }
                for (lb, sb) in &basis[a + 1..] {
                    if sa.inner(sb)?.norm() > DEFAULT_TOL {
                        return Err(ObservableError::BadBasis(format!("{la} and {lb} are not orthogonal")));
                    }
                }
            }
            let outcomes = basis
                .iter()
                .enumerate()
                .map(|(k, (label, s))| Outcome { label: label.clone(), eigenvalue: k as f64, projector: Matrix::projector(s) })
                .collect();
            ProjectiveObservable { label: format!("basis{targets:?}"), targets, outcomes }
        }
    };
    obs.validate(DEFAULT_TOL)?;
    Ok(obs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub observable: String,
    pub outcome: String,
    pub probability: f64,
}

/// One possible result of a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome_index: usize,
    pub record: MeasurementRecord,
    pub state: StateVector,
}

fn branch(
    obs: &ProjectiveObservable,
    s: &StateVector,
    k: usize,
    p: f64,
    amps: Vec<num_complex::Complex64>,
) -> Result<Branch, ObservableError> {
    Ok(Branch {
        outcome_index: k,
        record: MeasurementRecord { observable: obs.label.clone(), outcome: obs.outcomes[k].label.clone(), probability: p },
        state: StateVector::new(s.num_qubits(), amps)?,
    })
}

/// Every outcome with non-negligible probability, with its collapsed state.
pub fn measure_branches(s: &StateVector, obs: &ProjectiveObservable) -> Result<Vec<Branch>, ObservableError> {
    obs.project_all(s)?
        .into_iter()
        .enumerate()
        .filter(|(_, (p, _))| *p >= PRUNE_TOL)
        .map(|(k, (p, amps))| branch(obs, s, k, p, amps))
        .collect()
}

/// Draws one outcome by inverse CDF over the outcomes in declaration order.
pub fn measure_sample<R: Rng + ?Sized>(s: &StateVector, obs: &ProjectiveObservable, rng: &mut R) -> Result<Branch, ObservableError> {
    let projections = obs.project_all(s)?;
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (k, (p, _)) in projections.iter().enumerate() {
        if *p < PRUNE_TOL {
            continue;
        }
        cumulative += p;
        chosen = Some(k);
        if u < cumulative {
            break;
        }
    }
    let k = chosen.ok_or(ObservableError::State(StateError::ZeroNorm))?;
    let (p, amps) = projections.into_iter().nth(k).expect("index from enumeration");
    branch(obs, s, k, p, amps)
}

/// Independent per-trial random stream: ChaCha8 keyed by `seed`, stream
/// number `trial`. Results never depend on how trials are scheduled.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A node in an exact outcome tree. `probability` is the path probability
/// from the root; leaves carry a classification tag.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchNode<T> {
    pub record: Option<MeasurementRecord>,
    /// True for nodes produced by a state-preparation readout.
    pub preparation: bool,
    pub probability: f64,
    pub state: StateVector,
    pub children: Vec<BranchNode<T>>,
    pub tag: Option<T>,
}

impl<T> BranchNode<T> {
    pub fn root(state: StateVector) -> Self {
        Self { record: None, preparation: false, probability: 1.0, state, children: Vec::new(), tag: None }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves in depth-first order, each with the nodes on its path (root excluded).
    pub fn leaf_paths(&self) -> Vec<(&BranchNode<T>, Vec<&BranchNode<T>>)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn walk<'a, T>(
            node: &'a BranchNode<T>,
            path: &mut Vec<&'a BranchNode<T>>,
            out: &mut Vec<(&'a BranchNode<T>, Vec<&'a BranchNode<T>>)>,
        ) {
            if node.is_leaf() {
                out.push((node, path.clone()));
                return;
            }
            for child in &node.children {
                path.push(child);
                walk(child, path, out);
                path.pop();
            }
        }
        walk(self, &mut path, &mut out);
        out
    }

    pub fn leaves(&self) -> Vec<&BranchNode<T>> {
        self.leaf_paths().into_iter().map(|(leaf, _)| leaf).collect()
    }

    pub fn leaf_probability_sum(&self) -> f64 {
        self.leaves().iter().map(|l| l.probability).sum()
    }

    /// Largest `|Σ children − parent|` anywhere in the tree.
    pub fn max_conservation_error(&self) -> f64 {
        if self.is_leaf() {
            return 0.0;
        }
        let own = (self.children.iter().map(|c| c.probability).sum::<f64>() - self.probability).abs();
        self.children.iter().map(|c| c.max_conservation_error()).fold(own, f64::max)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }
}
