//! The `pgeo` command line: unit listings, theta_S ratio sweeps, Dirichlet tables,
//! Psi tables and the LMFDB cross-check.
//!
//! Exit codes: 0 success, 1 invalid input or a failed check, 2 environment failure
//! (files, network, locks).

pub mod commands;
pub mod config;

use clap::{Parser, Subcommand};
use config::{FileConfig, Overrides, RunConfig};
use std::ffi::OsString;
use std::io::Write;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Env(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Check(_) => 1,
            CliError::Env(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pgeo", version, about = "Unit counts in orders of cubic (and other prime-degree) fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the units in the box: charpoly, disc, alpha, multiplicity
    Enumerate,
    /// theta_S over each box of the grid, with ratio to T_1...T_k and the target constant
    ThetaSweep,
    /// Truncated Dirichlet series and its pole-rescaled value at each point
    Dirichlet,
    /// Psi over each box of the grid
    Psi,
    /// Compare h and R of the harvested fields against the LMFDB
    Crosscheck,
}

/// Parses `args`, runs the command and returns the process exit code. Data goes to
/// `out` (unless an output path is configured), diagnostics to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run_cli(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_cli(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.overrides.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let rc = RunConfig::resolve(file, &cli.overrides)?;
    init_logging(rc.verbosity);
    let mut sink: Box<dyn Write + '_> = match &rc.output {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| CliError::Env(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(out),
    };
    let res = match cli.command {
        Command::Enumerate => commands::enumerate(&rc, &mut sink),
        Command::ThetaSweep => commands::theta_sweep(&rc, &mut sink),
        Command::Dirichlet => commands::dirichlet(&rc, &mut sink),
        Command::Psi => commands::psi(&rc, &mut sink),
        Command::Crosscheck => commands::crosscheck(&rc, &mut sink),
    };
    sink.flush().map_err(|e| CliError::Env(e.to_string()))?;
    res
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
}
