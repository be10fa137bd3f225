//! Command-line front end for `cinterf`.
//!
//! The binary is a thin shell over [`run`]: parse flags, merge them over an
//! optional TOML file, validate, execute and write the result atomically.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;

pub use config::{Cli, RunConfig};
pub use error::{CliError, CliResult};

/// Runs one invocation end to end. With `strict`, a non-convergent
/// basis-pursuit solve is reported as an error after the output is written.
pub fn run(cli: &Cli) -> CliResult<()> {
    let config = config::resolve(cli)?;
    let report = commands::execute(&config)?;
    let bytes = output::render(&report, &config)?;
    output::emit(&bytes, config.output_path.as_deref())?;
    if config.strict && report.nonconverged > 0 {
        return Err(CliError::NonConvergence(format!(
            "{} basis-pursuit solve(s) hit the iteration cap",
            report.nonconverged
        )));
    }
    Ok(())
}
