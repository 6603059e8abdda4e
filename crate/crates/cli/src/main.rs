//! `kdv-utm`: profiles, error comparisons and validation suites for the
//! moving-interface linear KdV model.
//!
//! Every subcommand takes settings as `key=value` tokens or `--key value`
//! flags, optionally on top of a `config=FILE` of `key = value` lines.
//! Exit status is 0 on success, 1 when a computation or check fails and 2
//! for usage and configuration errors.

mod compare;
mod config;
mod error;
mod output;
mod profile;
mod validate;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "kdv-utm", version, about = "Moving-interface linear KdV solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate solution profiles and write CSV and SVG files per time.
    ///
    /// Keys: a, c, t (comma list, required), x_min, x_max, n, frame
    /// (shifted|traveling|lab), tau_factor, rel_tol, overlay
    /// (none|stationary), out_dir.
    Profile {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "SETTINGS")]
        settings: Vec<String>,
    },
    /// Compare the model and the linear KdV solution against a nonlinear KdV
    /// reference.
    ///
    /// Keys: a (comma list, required), t, window_min, window_max, kdv_x_max,
    /// kdv_n, kdv_dt, out_dir.
    Compare {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "SETTINGS")]
        settings: Vec<String>,
    },
    /// Run the invariant suites and print one report line per check.
    ///
    /// Keys: only, a, c, threshold.
    Validate {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "SETTINGS")]
        settings: Vec<String>,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Profile { settings } => profile::run(&RunConfig::from_args(&settings)?),
        Command::Compare { settings } => compare::run(&RunConfig::from_args(&settings)?),
        Command::Validate { settings } => validate::run(&RunConfig::from_args(&settings)?),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("kdv-utm: {e}");
        std::process::exit(e.exit_code());
    }
}
