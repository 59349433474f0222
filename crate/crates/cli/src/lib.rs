//! Command-line front end: `det`, `verify`, `sun` and `bench`.

pub mod args;
pub mod commands;

pub use args::{Cli, Command};
pub use commands::{run, CliError, Outcome, CSV_HEADER};
