//! `qusa <command> --config <path> [--seed N] [--out DIR]`
//!
//! Exit codes: 0 success, 1 unsatisfiable (`solve` only), 2 usage, parse or
//! run error, 3 cap refusal.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Command, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "qusa",
    version,
    about = "Triode/EQU network annealing simulator"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration, or JSON when the extension is `.json`.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the `out` key; defaults to `qusa-out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qusa_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_cap_refusal() => 3,
            _ => 2,
        }
    }
}

/// What a command reports besides its files.
pub enum Status {
    Done,
    Unsatisfiable,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let mut cfg = RunConfig::load(&cli.config)?;
    if let Some(c) = cfg.command {
        if c != cli.command {
            return Err(CliError::Usage(format!(
                "config is for `{}`, not `{}`",
                c.name(),
                cli.command.name()
            )));
        }
    }
    cfg.command = Some(cli.command);
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("qusa-out"));
    cfg.validate()?;
    std::fs::create_dir_all(&out)?;
    commands::execute(&cfg, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Unsatisfiable) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
