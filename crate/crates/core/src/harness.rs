//! Monte Carlo campaigns, exact-tree reports and compiler reports.
//!
//! Every exact column comes from an enumerated tree or branch list, never from
//! a constant. Trials run in parallel, each on its own stream
//! `trial_stream(seed, trial)`, and are aggregated in trial order, so a report
//! depends only on its configuration.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exchange::{r_gate, Axis, ExchangeCouplings};
use crate::observables::trial_stream;
use crate::protocols::dgb::{dgb_branches, dgb_target, dgb_z_rotation};
use crate::protocols::teleportation::{
    gate_teleport, gate_teleport_success_probability, state_teleport, state_teleport_branches, DEFAULT_TRIAL_CAP,
};
use crate::protocols::tree::TreeStats;
use crate::protocols::{
    enumerate_protocol_tree, teleport_rotation, Applied, CorrectionMode, CycleBranch, DriverPolicy, ProtocolError, ProtocolSetup, TreeSpec,
    MAX_TREE_CYCLES,
};
use crate::qstate::{gates, Matrix, StateError, StateVector, UnitaryMatrix, DEFAULT_TOL};
use crate::universality::{euler_synthesize, single_qubit_rotation, CompileError, EulerAngles, GateSequence};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
/// Largest `|z|` still flagged PASS.
pub const Z_THRESHOLD: f64 = 4.0;
/// Commonly quoted figure for measurements per cycle, printed next to the enumerated value.
pub const REFERENCE_MEASUREMENTS_PER_CYCLE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("cannot read matrix file {path}: {reason}")]
    MatrixFile { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Which exchange model the simulated device has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    #[default]
    Xy,
    /// `J_z = J_⊥/2`, tunable.
    Xxz,
    /// `J_z = J_⊥/2`, fixed ratio.
    XxzFixed,
    Heisenberg,
}

impl ModelChoice {
    pub fn couplings(self) -> ExchangeCouplings {
        match self {
            ModelChoice::Xy => ExchangeCouplings::xy(1.0),
            ModelChoice::Xxz => ExchangeCouplings::xxz(1.0, 0.5, true),
            ModelChoice::XxzFixed => ExchangeCouplings::xxz(1.0, 0.5, false),
            ModelChoice::Heisenberg => ExchangeCouplings::heisenberg(1.0),
        }
    }
}

impl std::str::FromStr for ModelChoice {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xy" => Ok(ModelChoice::Xy),
            "xxz" => Ok(ModelChoice::Xxz),
            "xxz-fixed" | "xxz_fixed" => Ok(ModelChoice::XxzFixed),
            "heisenberg" => Ok(ModelChoice::Heisenberg),
            other => Err(HarnessError::Config(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationConfig {
    pub axis: Axis,
    pub trials: u64,
    pub max_cycles: usize,
    pub seed: u64,
    pub phi_z0: f64,
    pub correction: CorrectionMode,
    pub model: ModelChoice,
    pub tolerance: f64,
}

impl RotationConfig {
    pub fn new(axis: Axis) -> Self {
        Self {
            axis,
            trials: DEFAULT_TRIALS,
            max_cycles: 1,
            seed: DEFAULT_SEED,
            phi_z0: 0.0,
            correction: CorrectionMode::Repeat,
            model: ModelChoice::Xy,
            tolerance: DEFAULT_TOL,
        }
    }

    fn setup(&self) -> ProtocolSetup {
        ProtocolSetup::new(self.axis, self.phi_z0, self.model.couplings())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgbConfig {
    pub phi: f64,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for DgbConfig {
    fn default() -> Self {
        Self { phi: FRAC_PI_4, trials: DEFAULT_TRIALS, seed: DEFAULT_SEED, tolerance: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportConfig {
    /// Inputs are `U|0⟩` when set, Haar-random otherwise.
    pub unitary: Option<String>,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for TeleportConfig {
    fn default() -> Self {
        Self { unitary: None, trials: DEFAULT_TRIALS, seed: DEFAULT_SEED, tolerance: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateTeleportConfig {
    pub unitary: String,
    pub trials: u64,
    pub seed: u64,
    pub trial_cap: usize,
    pub tolerance: f64,
}

impl Default for GateTeleportConfig {
    fn default() -> Self {
        Self { unitary: "h".into(), trials: DEFAULT_TRIALS, seed: DEFAULT_SEED, trial_cap: DEFAULT_TRIAL_CAP, tolerance: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeConfig {
    pub axis: Axis,
    pub cycles: usize,
    pub phi_z0: f64,
    pub correction: CorrectionMode,
    pub model: ModelChoice,
    /// Picks the probe input state.
    pub seed: u64,
    pub tolerance: f64,
}

impl TreeConfig {
    pub fn new(axis: Axis, cycles: usize) -> Self {
        Self {
            axis,
            cycles,
            phi_z0: 0.0,
            correction: CorrectionMode::Repeat,
            model: ModelChoice::Xy,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileConfig {
    pub target: String,
    pub tolerance: f64,
    /// `φᶻ` carried by every pulse in the sequence.
    pub phi_z: f64,
}

impl CompileConfig {
    pub fn new(target: impl Into<String>) -> Self {
        Self { target: target.into(), tolerance: DEFAULT_TOL, phi_z: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Rz(RotationConfig),
    Rx(RotationConfig),
    Dgb(DgbConfig),
    Teleport(TeleportConfig),
    GateTeleport(GateTeleportConfig),
    Tree(TreeConfig),
    Compile(CompileConfig),
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::Rz(_) => "rz",
            ExperimentConfig::Rx(_) => "rx",
            ExperimentConfig::Dgb(_) => "dgb",
            ExperimentConfig::Teleport(_) => "teleport",
            ExperimentConfig::GateTeleport(_) => "gate-teleport",
            ExperimentConfig::Tree(_) => "tree",
            ExperimentConfig::Compile(_) => "compile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Sampled against exact, judged by `|z|`.
    Statistical,
    /// Exact computation judged against a tolerance.
    Verification,
    /// Printed only.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub quantity: String,
    pub exact: f64,
    pub observed: Option<f64>,
    pub std_error: Option<f64>,
    pub z_score: Option<f64>,
    pub pass: bool,
    pub check: Check,
}

impl ReportRow {
    /// `observed` against `exact` with standard error `se`; `se = 0` passes only on equality.
    pub fn statistical(quantity: impl Into<String>, exact: f64, observed: f64, se: f64) -> Self {
        let diff = observed - exact;
        let z = if se > 0.0 {
            diff / se
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        Self {
            quantity: quantity.into(),
            exact,
            observed: Some(observed),
            std_error: Some(se),
            z_score: Some(z),
            pass: z.abs() <= Z_THRESHOLD,
            check: Check::Statistical,
        }
    }

    /// Bernoulli frequency `count / n` against probability `p`.
    pub fn proportion(quantity: impl Into<String>, p: f64, count: u64, n: u64) -> Self {
        let n_f = n as f64;
        Self::statistical(quantity, p, count as f64 / n_f, (p * (1.0 - p) / n_f).max(0.0).sqrt())
    }

    pub fn verification(quantity: impl Into<String>, exact: f64, observed: f64, tol: f64) -> Self {
        Self {
            quantity: quantity.into(),
            exact,
            observed: Some(observed),
            std_error: None,
            z_score: None,
            pass: (observed - exact).abs() <= tol,
            check: Check::Verification,
        }
    }

    pub fn info(quantity: impl Into<String>, exact: f64) -> Self {
        Self { quantity: quantity.into(), exact, observed: None, std_error: None, z_score: None, pass: true, check: Check::Info }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    StatisticalFail,
    ResidualExceeded,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::StatisticalFail => 2,
            Verdict::ResidualExceeded => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeSummary {
    pub cycles: usize,
    pub stats: TreeStats,
    /// `1/p` with `p` the single-cycle success mass.
    pub expected_cycles_uncapped: f64,
    pub reference_measurements_per_cycle: f64,
    pub min_leaf_fidelity: f64,
    pub path_counts_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileSummary {
    pub target: String,
    pub angles: EulerAngles,
    pub step_count: usize,
    pub elided: Vec<&'static str>,
    pub residual: f64,
    pub sequence: GateSequence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_cycles: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_measurements: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_trials: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compile: Option<CompileSummary>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
    pub wall_clock_seconds: f64,
}

impl Report {
    fn new(config: ExperimentConfig) -> Self {
        Self {
            config,
            rows: Vec::new(),
            success_rate: None,
            mean_cycles: None,
            mean_measurements: None,
            mean_trials: None,
            fidelity_min: None,
            fidelity_mean: None,
            tree: None,
            compile: None,
            notes: Vec::new(),
            verdict: Verdict::Pass,
            wall_clock_seconds: 0.0,
        }
    }

    fn settle(mut self) -> Self {
        let failed = |c: Check| self.rows.iter().any(|r| r.check == c && !r.pass);
        self.verdict = if failed(Check::Verification) {
            Verdict::ResidualExceeded
        } else if failed(Check::Statistical) {
            Verdict::StatisticalFail
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn row(&self, quantity: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes JSON or CSV, chosen by the file extension.
    pub fn write_to(&self, path: &Path) -> Result<(), HarnessError> {
        let body = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => self.to_json()?,
            Some("csv") => self.to_csv()?,
            _ => return Err(HarnessError::Config(format!("output {} must end in .json or .csv", path.display()))),
        };
        std::fs::write(path, body)?;
        Ok(())
    }
}

fn fmt_opt(v: Option<f64>, width: usize) -> String {
    match v {
        Some(x) => format!("{x:>width$.6}"),
        None => format!("{:>width$}", "-"),
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.config.name(), serde_json::to_string(&self.config).unwrap_or_default())?;
        writeln!(f, "{:<34} {:>12} {:>12} {:>12} {:>9}  result", "quantity", "exact", "observed", "std_error", "z")?;
        for r in &self.rows {
            let result = match (r.check, r.pass) {
                (Check::Info, _) => "info",
                (_, true) => "PASS",
                (_, false) => "FAIL",
            };
            let z = r.z_score.map_or_else(|| format!("{:>9}", "-"), |z| format!("{z:>9.3}"));
            writeln!(f, "{:<34} {:>12.6} {} {} {}  {}", r.quantity, r.exact, fmt_opt(r.observed, 12), fmt_opt(r.std_error, 12), z, result)?;
        }
        let scalars = [
            ("success_rate", self.success_rate),
            ("mean_cycles", self.mean_cycles),
            ("mean_measurements", self.mean_measurements),
            ("mean_trials", self.mean_trials),
            ("fidelity_min", self.fidelity_min),
            ("fidelity_mean", self.fidelity_mean),
        ];
        for (name, v) in scalars.iter().filter_map(|(n, v)| v.map(|v| (n, v))) {
            writeln!(f, "{name}: {v:.6}")?;
        }
        if let Some(c) = &self.compile {
            writeln!(f, "sequence ({} steps, residual {:.3e}):", c.step_count, c.residual)?;
            for (k, step) in c.sequence.steps.iter().enumerate() {
                writeln!(f, "  {:>2}. {step}", k + 1)?;
            }
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        writeln!(f, "verdict: {:?} ({:.3} s)", self.verdict, self.wall_clock_seconds)
    }
}

/// Runs `trial(rng)` for every trial index on its own stream, in parallel,
/// and returns the results in trial order.
pub fn run_trials<T, F>(trials: u64, seed: u64, trial: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T, HarnessError> + Sync,
{
    (0..trials).into_par_iter().map(|k| trial(&mut trial_stream(seed, k))).collect()
}

/// A fixed generic input for exact computations, derived from the seed.
pub fn probe_state(seed: u64) -> StateVector {
    StateVector::random(1, &mut trial_stream(seed, u64::MAX))
}

fn check_trials(trials: u64) -> Result<(), HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    Ok(())
}

fn check_tolerance(tol: f64) -> Result<(), HarnessError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(HarnessError::Config("tolerance must be positive".into()));
    }
    Ok(())
}

/// `E[min(T, cap)]` for `T` geometric with success probability `p`.
pub fn capped_geometric_mean(p: f64, cap: usize) -> f64 {
    if p <= 0.0 {
        return cap as f64;
    }
    (1.0 - (1.0 - p).powi(cap as i32)) / p
}

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 { xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, (var / n).sqrt())
}

fn fidelity_rows(report: &mut Report, fidelities: &[f64], tol: f64) {
    let min = fidelities.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = fidelities.iter().sum::<f64>() / fidelities.len() as f64;
    report.rows.push(ReportRow::verification("fidelity_min", 1.0, min, tol));
    report.fidelity_min = Some(min);
    report.fidelity_mean = Some(mean);
}

/// Exact quantities of the `R_β` driver, all read off enumerated trees.
#[derive(Debug, Clone, PartialEq)]
struct RotationExact {
    first_branch_mass: [f64; 4],
    success: f64,
    mean_cycles: f64,
    mean_cycles_uncapped: f64,
    mean_measurements: f64,
    measurements_per_cycle: f64,
    cycle_distribution: Option<Vec<f64>>,
}

fn rotation_exact(setup: &ProtocolSetup, policy: &DriverPolicy, psi: &StateVector) -> Result<(RotationExact, Vec<String>), HarnessError> {
    let mut notes = Vec::new();
    let spec = |cycles| TreeSpec { correction: policy.correction(), ..TreeSpec::new(*setup, cycles) };
    let single = enumerate_protocol_tree(psi, &spec(1))?.stats();
    let depth = match policy.correction() {
        CorrectionMode::Zz => 1,
        CorrectionMode::Repeat => policy.max_cycles(),
    };
    let exact = if depth <= MAX_TREE_CYCLES {
        let stats = enumerate_protocol_tree(psi, &spec(depth))?.stats();
        RotationExact {
            first_branch_mass: stats.first_cycle_branch_mass,
            success: stats.success_mass,
            mean_cycles: stats.expected_cycles,
            mean_cycles_uncapped: 1.0 / single.success_mass,
            mean_measurements: stats.expected_measurements,
            measurements_per_cycle: stats.measurements_per_cycle,
            cycle_distribution: Some(stats.cycle_distribution),
        }
    } else {
        notes.push(format!(
            "max_cycles {depth} exceeds the enumeration depth {MAX_TREE_CYCLES}; exact columns use the capped geometric law with the single-cycle success mass {:.6}",
            single.success_mass
        ));
        let p = single.success_mass;
        let mean_cycles = capped_geometric_mean(p, depth);
        RotationExact {
            first_branch_mass: single.first_cycle_branch_mass,
            success: 1.0 - (1.0 - p).powi(depth as i32),
            mean_cycles,
            mean_cycles_uncapped: 1.0 / p,
            mean_measurements: single.measurements_per_cycle * mean_cycles,
            measurements_per_cycle: single.measurements_per_cycle,
            cycle_distribution: None,
        }
    };
    Ok((exact, notes))
}

fn measurement_note(per_cycle: f64) -> String {
    format!(
        "measurements per cycle: enumeration gives {per_cycle:.6}; the often quoted value {REFERENCE_MEASUREMENTS_PER_CYCLE} weights only branches (i) and (iv), whose probabilities sum to 1/2"
    )
}

struct RotationTrial {
    first_branch: usize,
    success: bool,
    cycles: usize,
    measurements: usize,
    fidelity: f64,
}

pub fn run_protocol_experiment(cfg: &RotationConfig) -> Result<Report, HarnessError> {
    check_trials(cfg.trials)?;
    check_tolerance(cfg.tolerance)?;
    let setup = cfg.setup();
    let policy = DriverPolicy::new(cfg.max_cycles, cfg.correction)?;
    policy.check(&setup)?;
    let (exact, notes) = rotation_exact(&setup, &policy, &probe_state(cfg.seed))?;

    let outcomes = run_trials(cfg.trials, cfg.seed, |rng| {
        let psi = StateVector::random(1, rng);
        let out = teleport_rotation(&psi, &setup, &policy, rng)?;
        let t = &out.transcript;
        let target = psi.apply(&r_gate(cfg.axis, t.applied == Applied::RDagger), &[0])?;
        Ok(RotationTrial {
            first_branch: t.branches[0].index(),
            success: out.success,
            cycles: t.cycles,
            measurements: t.measurements,
            fidelity: out.output.fidelity(&target)?,
        })
    })?;

    let n = cfg.trials;
    let config = match cfg.axis {
        Axis::Z => ExperimentConfig::Rz(cfg.clone()),
        Axis::X => ExperimentConfig::Rx(cfg.clone()),
    };
    let mut report = Report::new(config);
    report.notes = notes;
    for b in CycleBranch::ALL {
        let count = outcomes.iter().filter(|o| o.first_branch == b.index()).count() as u64;
        report.rows.push(ReportRow::proportion(format!("cycle1_branch_{}", b.roman()), exact.first_branch_mass[b.index()], count, n));
    }
    let successes = outcomes.iter().filter(|o| o.success).count() as u64;
    report.rows.push(ReportRow::proportion("success_rate", exact.success, successes, n));
    if let Some(dist) = &exact.cycle_distribution {
        for (k, p) in dist.iter().enumerate() {
            let count = outcomes.iter().filter(|o| o.cycles == k + 1).count() as u64;
            report.rows.push(ReportRow::proportion(format!("stopped_after_{}_cycles", k + 1), *p, count, n));
        }
    }
    let (mean_cycles, se_cycles) = mean_and_se(outcomes.iter().map(|o| o.cycles as f64));
    report.rows.push(ReportRow::statistical("mean_cycles", exact.mean_cycles, mean_cycles, se_cycles));
    report.rows.push(ReportRow::info("mean_cycles_uncapped", exact.mean_cycles_uncapped));
    let (mean_meas, se_meas) = mean_and_se(outcomes.iter().map(|o| o.measurements as f64));
    report.rows.push(ReportRow::statistical("mean_measurements", exact.mean_measurements, mean_meas, se_meas));
    report.rows.push(ReportRow::info("measurements_per_cycle", exact.measurements_per_cycle));
    report.rows.push(ReportRow::info("measurements_per_cycle_reference", REFERENCE_MEASUREMENTS_PER_CYCLE));
    report.notes.push(measurement_note(exact.measurements_per_cycle));
    let fidelities: Vec<f64> = outcomes.iter().map(|o| o.fidelity).collect();
    fidelity_rows(&mut report, &fidelities, cfg.tolerance);

    report.success_rate = Some(successes as f64 / n as f64);
    report.mean_cycles = Some(mean_cycles);
    report.mean_measurements = Some(mean_meas);
    Ok(report.settle())
}

pub fn run_dgb_experiment(cfg: &DgbConfig) -> Result<Report, HarnessError> {
    check_trials(cfg.trials)?;
    check_tolerance(cfg.tolerance)?;
    let probe = probe_state(cfg.seed);
    let probe_target = dgb_target(&probe, cfg.phi)?;
    let exact = dgb_branches(&probe, cfg.phi)?;
    let p0 = exact.iter().find(|b| !b.corrected).map_or(0.0, |b| b.record.probability);

    let outcomes = run_trials(cfg.trials, cfg.seed, |rng| {
        let psi = StateVector::random(1, rng);
        let out = dgb_z_rotation(&psi, cfg.phi, rng)?;
        Ok((out.corrected, out.output.fidelity(&dgb_target(&psi, cfg.phi)?)?))
    })?;

    let mut report = Report::new(ExperimentConfig::Dgb(cfg.clone()));
    let zeros = outcomes.iter().filter(|o| !o.0).count() as u64;
    report.rows.push(ReportRow::proportion("outcome_0", p0, zeros, cfg.trials));
    report.rows.push(ReportRow::proportion("outcome_1_corrected", 1.0 - p0, cfg.trials - zeros, cfg.trials));
    let exact_min = exact.iter().map(|b| b.output.fidelity(&probe_target).unwrap_or(0.0)).fold(1.0, f64::min);
    report.rows.push(ReportRow::verification("exact_branch_fidelity_min", 1.0, exact_min, cfg.tolerance));
    let fidelities: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
    fidelity_rows(&mut report, &fidelities, cfg.tolerance);
    report.success_rate = Some(1.0);
    Ok(report.settle())
}

/// Resolves a gate name or a matrix file.
///
/// Names: `i x y z h s t`, `rx rz` (and `rxd rzd` for the adjoints),
/// `xrot:φ yrot:φ zrot:φ` for `e^{−iφσ}`.
pub fn resolve_unitary(spec: &str) -> Result<UnitaryMatrix, HarnessError> {
    let path = Path::new(spec);
    if path.is_file() {
        return parse_matrix_file(path);
    }
    let lower = spec.to_ascii_lowercase();
    if let Some((axis, angle)) = lower.split_once(':') {
        let theta: f64 = angle.trim().parse().map_err(|_| HarnessError::Config(format!("bad angle in {spec:?}")))?;
        let axis = axis.strip_suffix("rot").and_then(|a| a.chars().next()).filter(|_| axis.len() == 4);
        return axis
            .and_then(|a| single_qubit_rotation(a, theta))
            .ok_or_else(|| HarnessError::Config(format!("unknown rotation {spec:?}")));
    }
    Ok(match lower.as_str() {
        "i" | "id" | "identity" => gates::identity(),
        "x" => gates::pauli_x(),
        "y" => gates::pauli_y(),
        "z" => gates::pauli_z(),
        "h" | "hadamard" => gates::hadamard(),
        "s" => gates::phase_s(),
        "t" => gates::phase_t(),
        "rx" => r_gate(Axis::X, false),
        "rz" => r_gate(Axis::Z, false),
        "rxd" => r_gate(Axis::X, true),
        "rzd" => r_gate(Axis::Z, true),
        _ => return Err(HarnessError::Config(format!("{spec:?} is neither a known gate name nor a readable file"))),
    })
}

/// Four complex entries as `re im` pairs, row-major, whitespace-separated.
pub fn parse_matrix(text: &str) -> Result<UnitaryMatrix, HarnessError> {
    let numbers: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| HarnessError::Config(format!("not a number: {t:?}"))))
        .collect::<Result<_, _>>()?;
    if numbers.len() != 8 {
        return Err(HarnessError::Config(format!("expected 8 numbers (4 complex entries), found {}", numbers.len())));
    }
    let data = numbers.chunks(2).map(|c| num_complex::Complex64::new(c[0], c[1])).collect();
    Ok(UnitaryMatrix::new(Matrix::from_vec(data)?)?)
}

pub fn parse_matrix_file(path: &Path) -> Result<UnitaryMatrix, HarnessError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| HarnessError::MatrixFile { path: path.display().to_string(), reason: e.to_string() })?;
    parse_matrix(&text).map_err(|e| HarnessError::MatrixFile { path: path.display().to_string(), reason: e.to_string() })
}

pub fn run_teleport_experiment(cfg: &TeleportConfig) -> Result<Report, HarnessError> {
    check_trials(cfg.trials)?;
    check_tolerance(cfg.tolerance)?;
    let fixed = cfg.unitary.as_deref().map(resolve_unitary).transpose()?.map(|u| &u * &StateVector::zero());
    let probe = fixed.clone().unwrap_or_else(|| probe_state(cfg.seed));
    let exact = state_teleport_branches(&probe)?;

    let outcomes = run_trials(cfg.trials, cfg.seed, |rng| {
        let psi = fixed.clone().unwrap_or_else(|| StateVector::random(1, rng));
        let out = state_teleport(&psi, rng)?;
        Ok((out.alpha, out.output.fidelity(&psi)?))
    })?;

    let mut report = Report::new(ExperimentConfig::Teleport(cfg.clone()));
    for (alpha, label) in ["I", "X", "Y", "Z"].iter().enumerate() {
        let p = exact.iter().find(|b| b.alpha == alpha).map_or(0.0, |b| b.record.probability);
        let count = outcomes.iter().filter(|o| o.0 == alpha).count() as u64;
        report.rows.push(ReportRow::proportion(format!("bell_outcome_{label}"), p, count, cfg.trials));
    }
    let exact_min = exact.iter().map(|b| b.output.fidelity(&probe).unwrap_or(0.0)).fold(1.0, f64::min);
    report.rows.push(ReportRow::verification("exact_branch_fidelity_min", 1.0, exact_min, cfg.tolerance));
    let fidelities: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
    fidelity_rows(&mut report, &fidelities, cfg.tolerance);
    report.success_rate = Some(1.0);
    Ok(report.settle())
}

pub fn run_gate_teleport_experiment(cfg: &GateTeleportConfig) -> Result<Report, HarnessError> {
    check_trials(cfg.trials)?;
    check_tolerance(cfg.tolerance)?;
    if cfg.trial_cap == 0 {
        return Err(HarnessError::Config("trial cap must be at least 1".into()));
    }
    let u = resolve_unitary(&cfg.unitary)?;
    let p = gate_teleport_success_probability(&probe_state(cfg.seed), &u)?;

    let outcomes = run_trials(cfg.trials, cfg.seed, |rng| {
        let psi = StateVector::random(1, rng);
        match gate_teleport(&psi, &u, cfg.trial_cap, rng) {
            Ok(out) => Ok(Some((out.trials, out.output.fidelity(&(&u * &psi))?))),
            Err(ProtocolError::TrialCapExceeded(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    })?;

    let n = cfg.trials;
    let mut report = Report::new(ExperimentConfig::GateTeleport(cfg.clone()));
    let done: Vec<(usize, f64)> = outcomes.iter().flatten().copied().collect();
    let capped = n - done.len() as u64;
    // Every attempted trial is an independent Bernoulli(p) draw.
    let attempts: u64 = done.iter().map(|d| d.0 as u64).sum::<u64>() + capped * cfg.trial_cap as u64;
    report.rows.push(ReportRow::proportion("alpha_eq_beta_per_trial", p, done.len() as u64, attempts));
    let first = done.iter().filter(|d| d.0 == 1).count() as u64;
    report.rows.push(ReportRow::proportion("success_on_first_trial", p, first, n));
    let exact_mean = capped_geometric_mean(p, cfg.trial_cap);
    let (mean, se) = mean_and_se(outcomes.iter().map(|o| o.map_or(cfg.trial_cap, |d| d.0) as f64));
    report.rows.push(ReportRow::statistical("mean_trials", exact_mean, mean, se));
    report.rows.push(ReportRow::proportion("trial_cap_exceeded", (1.0 - p).powi(cfg.trial_cap as i32), capped, n));
    if !done.is_empty() {
        let fidelities: Vec<f64> = done.iter().map(|d| d.1).collect();
        fidelity_rows(&mut report, &fidelities, cfg.tolerance);
    }
    report.mean_trials = Some(mean);
    report.success_rate = Some(done.len() as f64 / n as f64);
    Ok(report.settle())
}

pub fn run_tree_report(cfg: &TreeConfig) -> Result<Report, HarnessError> {
    check_tolerance(cfg.tolerance)?;
    let setup = ProtocolSetup::new(cfg.axis, cfg.phi_z0, cfg.model.couplings());
    let psi = probe_state(cfg.seed);
    let spec = |cycles| TreeSpec { correction: cfg.correction, ..TreeSpec::new(setup, cycles) };
    let tree = enumerate_protocol_tree(&psi, &spec(cfg.cycles))?;
    let single = enumerate_protocol_tree(&psi, &spec(1))?.stats();
    let stats = tree.stats();
    let summary = TreeSummary {
        cycles: cfg.cycles,
        expected_cycles_uncapped: 1.0 / single.success_mass,
        reference_measurements_per_cycle: REFERENCE_MEASUREMENTS_PER_CYCLE,
        min_leaf_fidelity: tree.min_leaf_fidelity()?,
        path_counts_consistent: tree.path_counts_consistent(),
        stats: stats.clone(),
    };

    let mut report = Report::new(ExperimentConfig::Tree(cfg.clone()));
    for b in CycleBranch::ALL {
        report.rows.push(ReportRow::info(format!("cycle1_branch_{}", b.roman()), stats.first_cycle_branch_mass[b.index()]));
    }
    report.rows.push(ReportRow::info("success_mass", stats.success_mass));
    for (k, p) in stats.cycle_distribution.iter().enumerate() {
        report.rows.push(ReportRow::info(format!("stopped_after_{}_cycles", k + 1), *p));
    }
    report.rows.push(ReportRow::info("expected_cycles", stats.expected_cycles));
    report.rows.push(ReportRow::info("expected_cycles_uncapped", summary.expected_cycles_uncapped));
    report.rows.push(ReportRow::info("expected_measurements", stats.expected_measurements));
    report.rows.push(ReportRow::info("measurements_per_cycle", stats.measurements_per_cycle));
    report.rows.push(ReportRow::info("measurements_per_cycle_reference", REFERENCE_MEASUREMENTS_PER_CYCLE));
    report.rows.push(ReportRow::verification("leaf_probability_sum", 1.0, stats.leaf_mass, cfg.tolerance));
    report.rows.push(ReportRow::verification("max_conservation_error", 0.0, stats.max_conservation_error, cfg.tolerance));
    report.rows.push(ReportRow::verification("min_leaf_fidelity", 1.0, summary.min_leaf_fidelity, cfg.tolerance));
    report.rows.push(ReportRow::verification("path_counts_consistent", 1.0, f64::from(u8::from(summary.path_counts_consistent)), 0.0));
    report.notes.push(measurement_note(stats.measurements_per_cycle));
    report.success_rate = Some(stats.success_mass);
    report.mean_cycles = Some(stats.expected_cycles);
    report.mean_measurements = Some(stats.expected_measurements);
    report.fidelity_min = Some(summary.min_leaf_fidelity);
    report.tree = Some(summary);
    Ok(report.settle())
}

pub fn run_compile_report(cfg: &CompileConfig) -> Result<Report, HarnessError> {
    check_tolerance(cfg.tolerance)?;
    let u = resolve_unitary(&cfg.target)?;
    let synth = euler_synthesize(&u, cfg.phi_z)?;
    let mut report = Report::new(ExperimentConfig::Compile(cfg.clone()));
    report.rows.push(ReportRow::info("step_count", synth.sequence.step_count() as f64));
    report.rows.push(ReportRow::info("alpha", synth.angles.alpha));
    report.rows.push(ReportRow::info("beta", synth.angles.beta));
    report.rows.push(ReportRow::info("gamma", synth.angles.gamma));
    report.rows.push(ReportRow::verification("residual", 0.0, synth.residual, cfg.tolerance));
    if !synth.elided.is_empty() {
        report.notes.push(format!("elided zero-angle factors: {}", synth.elided.join(", ")));
    }
    report.compile = Some(CompileSummary {
        target: cfg.target.clone(),
        angles: synth.angles,
        step_count: synth.sequence.step_count(),
        elided: synth.elided,
        residual: synth.residual,
        sequence: synth.sequence,
    });
    Ok(report.settle())
}

/// Runs any experiment and stamps the wall clock.
pub fn run(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let start = Instant::now();
    let mut report = match config {
        ExperimentConfig::Rz(c) | ExperimentConfig::Rx(c) => run_protocol_experiment(c)?,
        ExperimentConfig::Dgb(c) => run_dgb_experiment(c)?,
        ExperimentConfig::Teleport(c) => run_teleport_experiment(c)?,
        ExperimentConfig::GateTeleport(c) => run_gate_teleport_experiment(c)?,
        ExperimentConfig::Tree(c) => run_tree_report(c)?,
        ExperimentConfig::Compile(c) => run_compile_report(c)?,
    };
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
