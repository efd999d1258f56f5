//! Command-line front end for the `cumulative_cbf` simulator: scenario
//! loading, CSV and SVG output, comparisons and parameter sweeps.

pub mod cli;
pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod svg;
pub mod tables;

pub use cli::Cli;
pub use error::{CliError, EXIT_CONFIG, EXIT_FAULT, EXIT_IO, EXIT_OK};
pub use report::RunManifest;

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_with_args<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match cli.execute() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
