//! Command-line arguments.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{self, GlobalOpts};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "ccbf",
    version,
    about = "Run cumulative-exposure safety filter scenarios"
)]
pub struct Cli {
    /// Replace each config's dt, keeping its simulated horizon.
    #[arg(long, global = true, value_name = "DT")]
    pub dt_override: Option<f64>,
    /// Recorded in manifests; simulations are deterministic and do not use it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress per-run summaries on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its CSV logs, plots and manifest.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several scenarios sharing J_limit and dt and overlay their exposure.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one scenario per parameter value, concurrently.
    Sweep {
        config: PathBuf,
        /// A, sigma, J_limit, alpha1, alpha2 or dt; several joined by commas.
        #[arg(long)]
        param: String,
        /// Comma-separated values; use `:` between components for paired params.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Cli {
    pub fn opts(&self) -> GlobalOpts {
        GlobalOpts {
            dt_override: self.dt_override,
            seed: self.seed,
            quiet: self.quiet,
        }
    }

    pub fn execute(&self) -> Result<u8> {
        let opts = self.opts();
        if let Some(dt) = opts.dt_override {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(crate::error::CliError::Usage(format!(
                    "--dt-override must be positive and finite, got {dt}"
                )));
            }
        }
        match &self.command {
            Command::Run { config, out } => commands::cmd_run(config, out, opts),
            Command::Compare { configs, out } => commands::cmd_compare(configs, out, opts),
            Command::Sweep {
                config,
                param,
                values,
                out,
            } => commands::cmd_sweep(config, param, values, out, opts),
        }
    }
}
