//! Command-line pipeline around `anosov-zeta-core`: run configuration,
//! file formats and the subcommands of the `anosov-zeta` executable.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

use std::ffi::OsString;

pub use args::{Cli, Command};
pub use config::RunConfig;
pub use error::{CliError, ExitStatus, Result};

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_from_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Config as i32 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.status() as i32
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let config = cli.opts.resolve()?;
    args::check_inputs(&config)?;
    let ctx = commands::Context::new(config)?;
    commands::run(cli.command, &ctx)
}
