//! Command-line frontend: argument grammar, dispatch and the JSON run report.

pub mod certfile;
mod commands;
mod config;
mod input;
pub mod plot;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{InputHash, RunReport};

/// Definitive answer.
pub const EXIT_OK: i32 = 0;
/// Usage, input or IO error.
pub const EXIT_ERROR: i32 = 1;
/// The solver could not decide.
pub const EXIT_UNRESOLVED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "polylyap", version, about = "SOS Lyapunov analysis for polynomial vector fields")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for flags not given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Record wall-clock time in the report. Reports are otherwise byte-identical across runs.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a polynomial is a sum of squares.
    CheckSos(CheckSosArgs),
    /// Search for an SOS Lyapunov function of one degree.
    FindLyapunov(FindArgs),
    /// Search over a list of degrees.
    Sweep(SweepArgs),
    /// Build the quartic, form or gradient field of a ONE-IN-THREE instance.
    Reduce(ReduceArgs),
    /// Decide a ONE-IN-THREE instance by enumeration.
    Oracle(OracleArgs),
    /// Integrate trajectories, optionally writing CSV and SVG.
    Simulate(SimulateArgs),
    /// Re-verify the certificates in a report or certificate file.
    Certify(CertifyArgs),
    /// List the built-in systems or write one out.
    Gallery(GalleryArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckSos(_) => "check-sos",
            Command::FindLyapunov(_) => "find-lyapunov",
            Command::Sweep(_) => "sweep",
            Command::Reduce(_) => "reduce",
            Command::Oracle(_) => "oracle",
            Command::Simulate(_) => "simulate",
            Command::Certify(_) => "certify",
            Command::Gallery(_) => "gallery",
        }
    }
}

pub const SUBCOMMANDS: [&str; 8] = [
    "check-sos",
    "find-lyapunov",
    "sweep",
    "reduce",
    "oracle",
    "simulate",
    "certify",
    "gallery",
];

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Full,
    Homogeneous,
    Newton,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StageArg {
    Poly,
    Form,
    Field,
}

/// Parameters of the parameterized gallery systems.
#[derive(Debug, Clone, Args)]
pub struct GalleryOpts {
    /// Bacciotti-Rosier parameter, as a decimal or fraction.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Rotation angle, replaced by an exact rational point on the unit circle.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckSosArgs {
    /// Polynomial file, or `gallery:motzkin` / `gallery:shifted-motzkin`.
    #[arg(long)]
    pub poly: String,
    /// Gram basis; defaults to homogeneous for forms and Newton otherwise.
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Round an SOS certificate to an exact rational one.
    #[arg(long)]
    pub rationalize: bool,
    /// Also write the certificate to this file.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MarginOpts {
    /// Drop both strictness margins.
    #[arg(long)]
    pub plain: bool,
    /// Margin on V.
    #[arg(long)]
    pub margin: Option<String>,
    /// Margin on -dV/dt.
    #[arg(long)]
    pub margin_deriv: Option<String>,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    /// Vector field file, or `gallery:NAME`.
    #[arg(long)]
    pub system: String,
    #[arg(long, required_unless_present = "power_of")]
    pub degree: Option<u32>,
    /// Search homogeneous V only.
    #[arg(long)]
    pub homogeneous: bool,
    #[command(flatten)]
    pub margins: MarginOpts,
    #[command(flatten)]
    pub gallery: GalleryOpts,
    /// Trajectories simulated to check that a found V decreases.
    #[arg(long, default_value_t = 10)]
    pub trajectories: usize,
    /// Instead of searching V, look for an SOS power of this function.
    #[arg(long)]
    pub power_of: Option<String>,
    /// Largest power tried with --power-of.
    #[arg(long, default_value_t = 10)]
    pub k_max: u32,
    /// Use V + 1 in the power search (planar systems).
    #[arg(long)]
    pub planar: bool,
    /// Also write the certificate to this file.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Vector field file, or `gallery:NAME`.
    #[arg(long)]
    pub system: String,
    /// Strictly ascending even degrees.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8")]
    pub degrees: Vec<u32>,
    #[arg(long)]
    pub homogeneous: bool,
    #[command(flatten)]
    pub margins: MarginOpts,
    #[command(flatten)]
    pub gallery: GalleryOpts,
    /// Stop at the first degree with a Lyapunov function.
    #[arg(long)]
    pub stop_on_found: bool,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// DIMACS file with three literals per clause.
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long, value_enum, default_value = "field")]
    pub emit: StageArg,
    /// Build this gadget from the form or field instead, e.g. `boundedness`.
    #[arg(long)]
    pub gadget: Option<String>,
    /// File for the emitted polynomial or field; defaults to the report only.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    /// Also cross-check the zero of the quartic and the equilibria of the field.
    #[arg(long)]
    pub chain: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Vector field file, or `gallery:NAME`.
    #[arg(long)]
    pub system: String,
    #[command(flatten)]
    pub gallery: GalleryOpts,
    /// Initial state as comma-separated numbers; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Vec<String>,
    /// Add this many deterministic initial states from a ball.
    #[arg(long)]
    pub random: Option<usize>,
    /// Radius of that ball.
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Polynomial file checked for monotone decrease and drawn as level sets.
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// A report written by another subcommand, or a certificate file.
    #[arg(long)]
    pub cert: PathBuf,
    /// Tolerance for floating-point certificates.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    /// System to write out; lists all systems when omitted.
    pub name: Option<String>,
    #[command(flatten)]
    pub gallery: GalleryOpts,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// What a run produced: exit code, report, and text for the two streams.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<RunReport>,
    pub stdout: String,
    pub stderr: String,
}

fn failure(message: String) -> Outcome {
    Outcome {
        code: EXIT_ERROR,
        report: None,
        stdout: String::new(),
        stderr: format!("error: {message}\n"),
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// writes every requested file.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match config::apply_defaults(argv) {
        Ok(a) => a,
        Err(e) => return failure(e.to_string()),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_ERROR, report: None, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, report: None, stdout: text, stderr: String::new() }
            };
        }
    };
    let start = Instant::now();
    let mut inputs = input::Inputs::default();
    let reply = commands::dispatch(&cli.command, &mut inputs);
    let elapsed = start.elapsed().as_secs_f64();
    let (reply, err) = match reply {
        Ok(r) => (r, None),
        Err(e) => (commands::Reply::error(&e), Some(e)),
    };
    let report = RunReport {
        command: cli.command.name().to_string(),
        inputs: inputs.into_hashes(),
        status: reply.status,
        exit_code: reply.code,
        results: reply.results,
        diagnostics: reply.diagnostics,
        wall_time: cli.common.timing.then_some(elapsed),
    };
    let json = report.to_json();
    let mut out = Outcome {
        code: report.exit_code,
        report: None,
        stdout: String::new(),
        stderr: err.map(|e| format!("error: {e}\n")).unwrap_or_default(),
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                out.code = EXIT_ERROR;
                out.stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
            } else {
                out.stderr.push_str(&format!("{}: {}\n", report.command, report.status));
            }
        }
        None => out.stdout = json,
    }
    out.report = Some(report);
    out
}
