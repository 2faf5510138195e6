//! Command-line front end for `hetssd`.
//!
//! Every command reads a [`config::RunConfig`] assembled from built-in
//! defaults, an optional JSON file and `--override key.path=value` flags.
//! Output files are written once, after all computation has finished.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{ConfigSources, Format, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "hetssd", version, about = "Bayes factors and sample size design for between-site heterogeneity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Dotted-path override, e.g. `target.alpha=0.05`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VAL")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Start from the standard settings; a config file is merged on top.
    #[arg(long = "paper-defaults")]
    pub standard_defaults: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal n per site for each m.
    Ssd {
        #[command(flatten)]
        common: Common,
        /// Sites to sweep: `3..17` (inclusive), `3,5,8` or `8`.
        #[arg(long, value_parser = MValues::parse)]
        m: Option<MValues>,
    },
    /// Predictive log BF01 samples under both models at one design.
    Predictive {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 80)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        m: u32,
        #[arg(long, default_value_t = 3.0)]
        k0: f64,
        #[arg(long, default_value_t = 3.0)]
        k1: f64,
    },
    /// Sample size sweeps for several design-prior locations.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = MValues::parse)]
        m: Option<MValues>,
        /// Comma-separated design-prior locations.
        #[arg(long = "mu-gamma", value_delimiter = ',', required = true)]
        mu_gamma: Vec<f64>,
    },
    /// Bayes factor for observed site estimates.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// CSV of site estimates (column `t`, or the first column).
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
        /// Subjects per site.
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
}

/// Site counts given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MValues(pub Vec<u32>);

impl MValues {
    fn parse(s: &str) -> Result<Self, String> {
        config::parse_m_values(s).map(MValues)
    }
}

fn load(common: &Common, m: Option<MValues>) -> CliResult<RunConfig> {
    let mut cfg = config::load(&ConfigSources {
        file: common.config.as_deref(),
        standard_defaults: common.standard_defaults,
        overrides: &common.overrides,
        seed: common.seed,
        m_values: m.map(|m| m.0),
    })?;
    if let Some(p) = &common.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = common.format {
        cfg.output.format = f;
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ssd { common, m } => commands::ssd(&load(&common, m)?),
        Command::Predictive { common, n, m, k0, k1 } => {
            commands::predictive(&load(&common, None)?, n, m, k0, k1).map(|_| ())
        }
        Command::Sensitivity { common, m, mu_gamma } => {
            commands::sensitivity(&load(&common, m)?, &mu_gamma)
        }
        Command::Analyze { common, data, n, sigma } => {
            let cfg = load(&common, None)?;
            commands::analyze(&cfg, &data, n, sigma, common.format, common.out.as_deref()).map(|_| ())
        }
    }
}
