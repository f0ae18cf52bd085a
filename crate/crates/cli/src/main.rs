mod commands;
mod config;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use collapse_spectra::Error;
use thiserror::Error;

use crate::config::{Cli, Format, RunConfig};

pub const THREADS_ENV: &str = "COLLAPSE_SPECTRA_THREADS";

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.0)
    }
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io(_) => EXIT_CONFIG,
            Self::Core(e) => match e {
                Error::InvalidInput(_)
                | Error::DomainError(_)
                | Error::InvalidMode(_)
                | Error::UnsupportedFamily(_)
                | Error::EmptyGroup { .. }
                | Error::DimensionMismatch(_) => EXIT_CONFIG,
                Error::NonConvergence { .. }
                | Error::NonFinite { .. }
                | Error::ExtrapolationUnstable { .. }
                | Error::GridTooCoarse { .. }
                | Error::AmbiguousPairing(_)
                | Error::NotSymmetric { .. }
                | Error::DegenerateDesign(_)
                | Error::NonPositiveMass { .. } => EXIT_NUMERICAL,
            },
        }
    }
}

fn init_threads() -> Result<(), RunError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| RunError::Config(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| RunError::Config(format!("cannot build thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), RunError> {
    init_threads()?;
    let config = RunConfig::from_cli(cli)?;
    let report = commands::run(&config)?;
    let sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match config.format {
        Format::Json => report.write_json(&mut sink)?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
