//! `kazhdan`: build, solve, certify, verify and tabulate.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or invalid input (including
//! malformed input files),
//! 3 solver failure, 4 certification failure, 5 resource limit.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kazhdan::Error;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_CERTIFICATION: u8 = 4;
pub const EXIT_RESOURCE: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "kazhdan",
    version,
    about = "Certified lower bounds for Kazhdan constants of Chevalley groups over Z"
)]
pub struct Cli {
    /// TOML run configuration; unknown keys are rejected.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for the data-parallel loops.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Append structured JSON-lines logs to this file.
    #[arg(long, global = true)]
    pub log_json: Option<PathBuf>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Directory for cached balls and product tables.
    #[arg(long, env = "KAZHDAN_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Ignore caches and checkpoints and recompute everything.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Root system family: A or C for solving.
    pub family: String,
    pub rank: usize,
    /// delta_sq, adj or levels23.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(short = 'R', long)]
    pub radius: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots, admissible planes, gamma and plane incidences.
    Roots {
        family: String,
        rank: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Solve, certify and write a certificate.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// native, scs or clarabel.
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        time_limit: Option<f64>,
        /// Solve for feasibility at this λ instead of maximizing λ; the
        /// certificate then proves a bound slightly below it.
        #[arg(long)]
        fixed_lambda: Option<f64>,
        /// Attempt certification when the solver stops without converging.
        /// Sound either way; only the chance of success changes.
        #[arg(long)]
        certify_unconverged: bool,
        /// Seconds between solver checkpoints.
        #[arg(long)]
        checkpoint_every: Option<f64>,
        /// Directory for certificates and checkpoints.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        cache: CacheArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Re-verify certificates from file without a solver.
    Verify {
        #[arg(required = true)]
        certificates: Vec<PathBuf>,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Regenerate the bound tables.
    Report {
        /// Constants file replacing the shipped one.
        #[arg(long)]
        constants: Option<PathBuf>,
        /// Verified certificates whose constants override the file.
        #[arg(long = "certificate")]
        certificates: Vec<PathBuf>,
        /// Use certificate constants even when larger than the file's.
        #[arg(long = "override")]
        force: bool,
        /// Restrict to one family; B and C go together.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 20)]
        max_rank: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write report.json and report.txt into this directory.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Replay of the transfer from C3 to Cn.
    Trace {
        n: usize,
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Write the SDP in SDPA sparse format.
    Export {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        cache: CacheArgs,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Unsupported(_) | Error::Contract(_) | Error::Format { .. } => EXIT_USAGE,
        Error::Resource(_) | Error::Overflow(_) => EXIT_RESOURCE,
        Error::SolverEnvironment(_) => EXIT_SOLVER,
        Error::Certification(_) => EXIT_CERTIFICATION,
        _ => EXIT_OTHER,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(exit_code(&e), e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let code = e.downcast_ref::<Error>().map_or(EXIT_OTHER, exit_code);
        Failure { code, error: e }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            tracing::error!(code = f.code, error = %format!("{:#}", f.error), "command failed");
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
