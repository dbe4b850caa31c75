//! Command-line front end: builds the fiber, runs the pipeline and renders
//! reports as text or as line-delimited JSON records.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

mod commands;
mod config;

pub use commands::{analyze, Analysis, SurvivorRing};
pub use config::{read_presentation, FiberSpec, JobArgs, JobConfig, OutputFormat};

#[derive(Debug, Parser)]
#[command(name = "orbitcoh", version, about = "Mod 2 cohomology of orbit spaces of free involutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify candidate induced actions on the fiber cohomology.
    Actions(JobArgs),
    /// Run every differential assignment and rebuild the orbit ring of each survivor.
    Analyze(JobArgs),
    /// Print the dimension grid of one page of one case.
    Pages {
        #[command(flatten)]
        job: JobArgs,
        /// Case identifier as listed by `analyze`.
        #[arg(long = "case")]
        case_id: String,
        /// Page number, at least 2; pages past the last one show E_inf.
        #[arg(long = "page", default_value_t = 2)]
        r: u32,
    },
    /// Check a presentation's Poincaré series against the unique survivor.
    Verify {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long)]
        presentation: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Presentation {
        path: PathBuf,
        source: orbitcoh::AlgebraError,
    },
    #[error(transparent)]
    Engine(#[from] orbitcoh::EngineError),
    #[error(transparent)]
    Ring(#[from] orbitcoh::RingError),
    #[error(transparent)]
    Involution(#[from] orbitcoh::InvolutionError),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("case {0} was eliminated before any page was computed")]
    NoPages(String),
    #[error("expected exactly one surviving case, found {0}")]
    NoUniqueSurvivor(usize),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("encoding output: {0}")]
    Encode(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Presentation { .. } => 2,
            _ => 3,
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// `verify` found a mismatch.
    CheckFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::CheckFailed => 1,
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    match &cli.command {
        Command::Actions(job) => commands::cmd_actions(&JobConfig::from_args(job)?, out),
        Command::Analyze(job) => commands::cmd_analyze(&JobConfig::from_args(job)?, out),
        Command::Pages { job, case_id, r } => {
            commands::cmd_pages(&JobConfig::from_args(job)?, case_id, *r, out)
        }
        Command::Verify { job, presentation } => {
            commands::cmd_verify(&JobConfig::from_args(job)?, presentation, out)
        }
    }
}

/// Parses `args` (including the program name) and runs in memory.
pub fn run_captured<I, S>(args: I) -> Captured
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return Captured {
                code: e.exit_code(),
                stdout: String::new(),
                stderr: e.to_string(),
            }
        }
    };
    let mut buf = Vec::new();
    let (code, stderr) = match run(&cli, &mut buf) {
        Ok(status) => (status.exit_code(), String::new()),
        Err(e) => (e.exit_code(), format!("error: {e}\n")),
    };
    Captured {
        code,
        stdout: String::from_utf8(buf).expect("reports are UTF-8"),
        stderr,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Captured {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}
