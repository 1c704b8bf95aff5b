//! `qmeas`: analyze measurement documents, sweep catalog families, audit
//! random measurements and cross-check formulas against Haar oracles.
//!
//! Exit codes: 0 success, 1 invalid input or arguments, 2 numerical
//! failure (including a violated relation or an oracle mismatch).

pub mod commands;
pub mod document;
pub mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmeas_core::Tolerances;

pub use document::MeasurementDocument;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qmeas", version, about = "Information gain, disturbance and reversibility of quantum measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information contents, trade-off relations, Venn region and optimal
    /// reversal of a measurement document.
    Analyze(AnalyzeArgs),
    /// Venn region only (same as `analyze --classify-only`).
    Classify(ClassifyArgs),
    /// CSV sweep of a catalog family or a document template over a
    /// parameter range.
    Sweep(SweepArgs),
    /// Checks every relation on seeded random measurements.
    Audit(AuditArgs),
    /// Formula, exact oracle and Monte Carlo values side by side.
    OracleCheck(OracleCheckArgs),
    /// Writes a catalog measurement as a document.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Completeness tolerance on ‖Σ M†M − 1‖_F [default: document value, else 1e-8].
    #[arg(long = "tol-complete", value_name = "TOL")]
    pub tol_complete: Option<f64>,
    /// Saturation tolerance on slacks and structural conditions.
    #[arg(long = "tol-sat", value_name = "TOL", default_value_t = 1e-8)]
    pub tol_sat: f64,
    /// Require the G-R rank-one direction to be a computational basis ket.
    #[arg(long)]
    pub strict_gr: bool,
}

impl ToleranceArgs {
    /// Tolerances with the completeness tolerance resolved against the
    /// document's own value.
    pub fn resolve(&self, document_tol: Option<f64>) -> CliResult<Tolerances> {
        let completeness = self
            .tol_complete
            .or(document_tol)
            .unwrap_or(qmeas_core::measurement::COMPLETENESS_TOL);
        for (name, v) in [("--tol-complete", completeness), ("--tol-sat", self.tol_sat)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::input(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Tolerances {
            completeness,
            saturation: self.tol_sat,
            strict_gr: self.strict_gr,
            ..Tolerances::default()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// Schur-Weyl closed-form Haar averages.
    Exact,
    /// Haar Monte Carlo.
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Monte Carlo samples per quantity.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// RNG seed.
    #[arg(long, env = "QMEAS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Measurement document (JSON).
    pub file: PathBuf,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    /// Cross-check the formulas against an oracle.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleMode>,
    #[command(flatten)]
    pub mc: McArgs,
    /// Machine-readable JSON report.
    #[arg(long)]
    pub json: bool,
    /// Print only the Venn classification.
    #[arg(long)]
    pub classify_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Measurement document (JSON).
    pub file: PathBuf,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    /// Machine-readable JSON report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["family", "template"])))]
pub struct SweepArgs {
    /// Catalog family name.
    #[arg(long)]
    pub family: Option<String>,
    /// Document whose entries may be expressions in `p`.
    #[arg(long, value_name = "FILE")]
    pub template: Option<PathBuf>,
    /// Lower end of the range [default: family range, else 0].
    #[arg(long = "from", value_name = "P")]
    pub from: Option<f64>,
    /// Upper end of the range [default: family range, else 1].
    #[arg(long = "to", value_name = "P")]
    pub to: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// CSV output path [default: stdout].
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Hilbert-space dimension.
    #[arg(long = "dim", short = 'd')]
    pub dim: usize,
    /// Outcomes per measurement.
    #[arg(long, short = 'n', default_value_t = 2)]
    pub outcomes: usize,
    /// Number of random measurements.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// RNG seed.
    #[arg(long, env = "QMEAS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["file", "family"])))]
pub struct OracleCheckArgs {
    /// Measurement document (JSON).
    pub file: Option<PathBuf>,
    /// Catalog family name (with --param).
    #[arg(long, requires = "param")]
    pub family: Option<String>,
    /// Family parameter.
    #[arg(long)]
    pub param: Option<f64>,
    #[command(flatten)]
    pub mc: McArgs,
    /// Completeness tolerance [default: document value, else 1e-8].
    #[arg(long = "tol-complete", value_name = "TOL")]
    pub tol_complete: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    /// Catalog family name.
    #[arg(long)]
    pub family: String,
    /// Family parameter.
    #[arg(long)]
    pub param: f64,
    /// Leave out the reversal block.
    #[arg(long)]
    pub no_reversal: bool,
    /// Output path [default: stdout].
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Runs one parsed command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Analyze(args) => commands::analyze(&args, out),
        Command::Classify(args) => commands::analyze(
            &AnalyzeArgs {
                file: args.file,
                tol: args.tol,
                oracle: None,
                mc: McArgs { samples: 0, seed: 0 },
                json: args.json,
                classify_only: true,
            },
            out,
        ),
        Command::Sweep(args) => commands::sweep(&args, out),
        Command::Audit(args) => commands::audit(&args, out),
        Command::OracleCheck(args) => commands::oracle_check(&args, out),
        Command::Export(args) => commands::export(&args, out),
    }
}
