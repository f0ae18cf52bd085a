//! Command-line flags, the optional JSON config file, and their merge into
//! one `RunConfig` (flags > file > defaults).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use collapse_spectra::coeffs::{FlatteningProfile, RadialProfile};
use collapse_spectra::harness::{LimitSelector, DEFAULT_EPS_SCHEDULE};
use collapse_spectra::limit_spectrum::BoundaryCondition;
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Parser, Debug)]
#[command(name = "collapse-spectra", version, about = "Spectra of flattening spheroids and their eigenvalue asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Comma-separated flattening parameters.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Boundary condition of the limit eigenvalue: dirichlet or neumann.
    #[arg(long, global = true)]
    pub bc: Option<String>,
    /// Angular order ν.
    #[arg(long, global = true)]
    pub nu: Option<u32>,
    /// Radial index k (ellipse: mode number).
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Number of rows (limit) or eigenvalues (direct).
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Largest azimuthal mode for the direct solver.
    #[arg(long, global = true)]
    pub mmax: Option<u32>,
    /// Grid resolution constant C in N = max(64, C/ε).
    #[arg(long = "grid-c", global = true)]
    pub grid_c: Option<f64>,
    /// Tolerance of the δ → 0 extrapolation.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Limit eigenvalue selectors bc:ν:k for validate (repeatable).
    #[arg(long, global = true, value_delimiter = ',')]
    pub eig: Option<Vec<String>>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// List limit eigenvalues (Dirichlet and Neumann disk spectra).
    Limit,
    /// Coefficient matrices, μ_k and predictions for one limit eigenvalue.
    Coeffs,
    /// Direct eigenvalues of the flattened spheroid.
    Direct,
    /// Ellipse closed form against its three-term expansion.
    Ellipse,
    /// Fit direct eigenvalues against the predicted coefficients.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Limit => "limit",
            Self::Coeffs => "coeffs",
            Self::Direct => "direct",
            Self::Ellipse => "ellipse",
            Self::Validate => "validate",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Contents of `--config`; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    eps: Option<Vec<f64>>,
    bc: Option<String>,
    nu: Option<u32>,
    k: Option<u32>,
    count: Option<usize>,
    mmax: Option<u32>,
    grid_c: Option<f64>,
    tol: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    eig: Option<Vec<String>>,
    profile: Option<ProfileConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileConfig {
    /// `"ellipsoid"`.
    Named(String),
    /// `{"q_coeffs": [...]}`, `q(r) = Σ c_i r^{2i}`.
    Polynomial { q_coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub profile: ProfileConfig,
    pub bc: BoundaryCondition,
    pub nu: u32,
    pub k: u32,
    pub eig: Vec<LimitSelector>,
    pub eps: Vec<f64>,
    pub count: usize,
    pub mmax: u32,
    pub grid_c: f64,
    pub tol: f64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_DIRECT_GRID_C: f64 = 500.0;
pub const DEFAULT_EXTRAPOLATION_TOL: f64 = 1e-4;

fn default_eps(command: Command) -> Vec<f64> {
    match command {
        Command::Direct => vec![0.1],
        Command::Ellipse => vec![0.1, 0.05, 0.025],
        _ => DEFAULT_EPS_SCHEDULE.to_vec(),
    }
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("bad config file {}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let command = cli.command;
        let bc = match cli.bc.or(file.bc) {
            Some(s) => s.parse().map_err(|e| ConfigError(format!("{e}")))?,
            None => BoundaryCondition::Dirichlet,
        };
        let eig = match cli.eig.or(file.eig) {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<LimitSelector>().map_err(|e| ConfigError(format!("{e}"))))
                .collect::<Result<_, _>>()?,
            None => vec![
                "dirichlet:0:1".parse().expect("valid selector"),
                "neumann:1:1".parse().expect("valid selector"),
            ],
        };
        let config = Self {
            command,
            profile: file.profile.unwrap_or_else(|| ProfileConfig::Named("ellipsoid".into())),
            bc,
            nu: cli.nu.or(file.nu).unwrap_or(0),
            k: cli.k.or(file.k).unwrap_or(1),
            eig,
            eps: cli.eps.or(file.eps).unwrap_or_else(|| default_eps(command)),
            count: cli.count.or(file.count).unwrap_or(if command == Command::Direct { 9 } else { 10 }),
            mmax: cli.mmax.or(file.mmax).unwrap_or(2),
            grid_c: cli.grid_c.or(file.grid_c).unwrap_or(DEFAULT_DIRECT_GRID_C),
            tol: cli.tol.or(file.tol).unwrap_or(DEFAULT_EXTRAPOLATION_TOL),
            format: cli.format.or(file.format).unwrap_or(Format::Json),
            out: cli.out.or(file.out),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.eps.is_empty() {
            return Err(ConfigError("no epsilon values given".into()));
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(ConfigError(format!("epsilon {e} outside (0, 1]")));
        }
        if !(self.tol > 0.0) {
            return Err(ConfigError(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.grid_c > 0.0) || !self.grid_c.is_finite() {
            return Err(ConfigError(format!("grid constant must be positive, got {}", self.grid_c)));
        }
        if self.count == 0 {
            return Err(ConfigError("count must be positive".into()));
        }
        self.flattening_profile()?;
        Ok(())
    }

    pub fn flattening_profile(&self) -> Result<FlatteningProfile, ConfigError> {
        match &self.profile {
            ProfileConfig::Named(name) if name == "ellipsoid" => Ok(FlatteningProfile::ellipsoid()),
            ProfileConfig::Named(name) => Err(ConfigError(format!("unknown profile '{name}'"))),
            ProfileConfig::Polynomial { q_coeffs } => RadialProfile::from_q_coeffs(q_coeffs.clone())
                .map(FlatteningProfile::symmetric)
                .map_err(|e| ConfigError(format!("{e}"))),
        }
    }
}
