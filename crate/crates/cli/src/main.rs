//! `xtel`: runs protocol campaigns, exact trees and compiler checks.
//!
//! Exit status: 0 pass, 1 usage or input error, 2 statistical failure,
//! 3 verification residual exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exchange_teleport::harness::{
    self, CompileConfig, DgbConfig, GateTeleportConfig, ModelChoice, RotationConfig, TeleportConfig, TreeConfig, DEFAULT_SEED,
    DEFAULT_TRIALS,
};
use exchange_teleport::protocols::teleportation::DEFAULT_TRIAL_CAP;
use exchange_teleport::qstate::DEFAULT_TOL;
use exchange_teleport::{Axis, CorrectionMode, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "xtel", version, about = "Measurement-based R gates on exchange-coupled spins")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Teleport R_z onto a random state, repeating on R_z† outcomes.
    Rz(RotationArgs),
    /// Teleport R_x onto a random state, repeating on R_x† outcomes.
    Rx(RotationArgs),
    /// Z rotation on a phase qubit through one ancilla and a ZZ coupling.
    Dgb(DgbArgs),
    /// Plain state teleportation through a Bell pair.
    Teleport(TeleportArgs),
    /// Recursive single-qubit gate teleportation.
    GateTeleport(GateTeleportArgs),
    /// Exact outcome tree of the R-gate driver.
    Tree(TreeArgs),
    /// Compile a single-qubit gate into exchange pulses and R gates.
    Compile(CompileArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Z,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Z => Axis::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorrectionArg {
    /// Run another cycle along the flipped pathway.
    Repeat,
    /// Finish with a single ZZ pulse.
    Zz,
}

impl From<CorrectionArg> for CorrectionMode {
    fn from(c: CorrectionArg) -> Self {
        match c {
            CorrectionArg::Repeat => CorrectionMode::Repeat,
            CorrectionArg::Zz => CorrectionMode::Zz,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Xy,
    Xxz,
    XxzFixed,
    Heisenberg,
}

impl From<ModelArg> for ModelChoice {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Xy => ModelChoice::Xy,
            ModelArg::Xxz => ModelChoice::Xxz,
            ModelArg::XxzFixed => ModelChoice::XxzFixed,
            ModelArg::Heisenberg => ModelChoice::Heisenberg,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Also write the report here (.json or .csv).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Fidelity and residual tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tolerance: f64,
}

#[derive(Debug, Args)]
struct Sampling {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RotationArgs {
    #[command(flatten)]
    sampling: Sampling,
    #[arg(long, default_value_t = 1)]
    max_cycles: usize,
    /// ZZ phase carried by the preparation pulse.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_z0: f64,
    #[arg(long, value_enum, default_value_t = CorrectionArg::Repeat)]
    correction: CorrectionArg,
    #[arg(long, value_enum, default_value_t = ModelArg::Xy)]
    model: ModelArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct DgbArgs {
    /// Rotation angle; the target is exp(-i phi Z / 2).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_negative_numbers = true)]
    phi: f64,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TeleportArgs {
    /// Teleport U|0> instead of Haar-random states.
    #[arg(long, value_name = "NAME|FILE")]
    unitary: Option<String>,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct GateTeleportArgs {
    /// Gate name (i x y z h s t rx rz rxd rzd xrot:A yrot:A zrot:A) or matrix file.
    #[arg(long, value_name = "NAME|FILE", default_value = "h")]
    unitary: String,
    #[arg(long, default_value_t = DEFAULT_TRIAL_CAP)]
    trial_cap: usize,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TreeArgs {
    #[arg(long, value_enum, default_value_t = AxisArg::Z)]
    axis: AxisArg,
    #[arg(long, default_value_t = 1)]
    cycles: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_z0: f64,
    #[arg(long, value_enum, default_value_t = CorrectionArg::Repeat)]
    correction: CorrectionArg,
    #[arg(long, value_enum, default_value_t = ModelArg::Xy)]
    model: ModelArg,
    /// Selects the probe input state.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CompileArgs {
    /// Gate name (i x y z h s t rx rz rxd rzd xrot:A yrot:A zrot:A) or matrix file.
    #[arg(long, value_name = "NAME|FILE")]
    target: String,
    /// ZZ phase used by every exchange pulse in the sequence.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_z: f64,
    #[command(flatten)]
    common: Common,
}

impl RotationArgs {
    fn config(&self, axis: Axis) -> RotationConfig {
        RotationConfig {
            axis,
            trials: self.sampling.trials,
            max_cycles: self.max_cycles,
            seed: self.sampling.seed,
            phi_z0: self.phi_z0,
            correction: self.correction.into(),
            model: self.model.into(),
            tolerance: self.common.tolerance,
        }
    }
}

fn experiment(command: &Command) -> (ExperimentConfig, &Common) {
    match command {
        Command::Rz(a) => (ExperimentConfig::Rz(a.config(Axis::Z)), &a.common),
        Command::Rx(a) => (ExperimentConfig::Rx(a.config(Axis::X)), &a.common),
        Command::Dgb(a) => (
            ExperimentConfig::Dgb(DgbConfig {
                phi: a.phi,
                trials: a.sampling.trials,
                seed: a.sampling.seed,
                tolerance: a.common.tolerance,
            }),
            &a.common,
        ),
        Command::Teleport(a) => (
            ExperimentConfig::Teleport(TeleportConfig {
                unitary: a.unitary.clone(),
                trials: a.sampling.trials,
                seed: a.sampling.seed,
                tolerance: a.common.tolerance,
            }),
            &a.common,
        ),
        Command::GateTeleport(a) => (
            ExperimentConfig::GateTeleport(GateTeleportConfig {
                unitary: a.unitary.clone(),
                trials: a.sampling.trials,
                seed: a.sampling.seed,
                trial_cap: a.trial_cap,
                tolerance: a.common.tolerance,
            }),
            &a.common,
        ),
        Command::Tree(a) => (
            ExperimentConfig::Tree(TreeConfig {
                axis: a.axis.into(),
                cycles: a.cycles,
                phi_z0: a.phi_z0,
                correction: a.correction.into(),
                model: a.model.into(),
                seed: a.seed,
                tolerance: a.common.tolerance,
            }),
            &a.common,
        ),
        Command::Compile(a) => (
            ExperimentConfig::Compile(CompileConfig { target: a.target.clone(), tolerance: a.common.tolerance, phi_z: a.phi_z }),
            &a.common,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (config, common) = experiment(&cli.command);
    if let Some(path) = &common.out {
        if !matches!(path.extension().and_then(|e| e.to_str()), Some("json" | "csv")) {
            eprintln!("error: output {} must end in .json or .csv", path.display());
            return ExitCode::from(1);
        }
    }
    let report = match harness::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    print!("{report}");
    if let Some(path) = &common.out {
        if let Err(e) = report.write_to(path) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(report.verdict.exit_code() as u8)
}
