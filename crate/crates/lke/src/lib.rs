//! Command-line front end for `lke-core`. Kernel grids and densities are
//! written as CSV; `verify` and `spin` print to standard output.
//!
//! ```text
//! lke fig1 --out fig1.csv
//! lke fig3 --reduced --threads 4
//! lke nonlocal --E-m 0.3,1.5,2.7
//! lke verify
//! ```

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod parallel;
pub mod verify;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{execute, run, Report};
pub use config::{Cli, Command, RunConfig};
pub use error::CliError;

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    let e = CliError::Usage(commands::one_line(&e.render().to_string()));
                    eprintln!("lke: {e}");
                    e.exit_code()
                }
            };
        }
    };
    match RunConfig::resolve(cli.command, &cli.flags) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("lke: {}", commands::one_line(&e.to_string()));
            e.exit_code()
        }
    }
}
