//! Command-line front end for `tullock-core`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit status; the `tullock` binary is a thin wrapper around it.

mod commands;
pub mod number;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Process exit status. Every outcome maps to exactly one code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    VerificationFailed = 1,
    InputError = 2,
    NoConvergence = 3,
    Infeasible = 4,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tullock",
    version,
    about = "Tullock contest equilibria and coalition valuation design"
)]
pub struct Cli {
    /// Emit a single JSON object at full precision instead of a text report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form Nash equilibrium of the contest.
    Solve { spec: PathBuf },
    /// Cross-check the closed form against best-response iteration and a
    /// unilateral-deviation test.
    Verify {
        spec: PathBuf,
        /// Largest payoff gain from a unilateral deviation that still passes.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Optimal valuations for the coalition members.
    Design {
        spec: PathBuf,
        /// Use the general solver even when the closed form applies.
        #[arg(long)]
        general: bool,
    },
    /// Trace the balanced designs of a two-member coalition as a CSV file.
    Sweep {
        spec: PathBuf,
        /// Smallest first-member valuation [default: v_K / 2].
        #[arg(long)]
        v2_min: Option<f64>,
        /// Largest first-member valuation [default: 2.5 v_K].
        #[arg(long)]
        v2_max: Option<f64>,
        /// Number of evenly spaced grid points, endpoints included.
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Where to write the CSV.
        #[arg(long)]
        out: PathBuf,
    },
}

/// A command that could not produce its result.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            status: Status::InputError,
            message: message.into(),
        }
    }
}

impl From<spec::SpecError> for Failure {
    fn from(e: spec::SpecError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

/// Runs the command line `args` (program name first), writing reports to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Status
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if informational {
                let _ = write!(out, "{}", e.render());
                return Status::Success;
            }
            let _ = write!(err, "{}", e.render());
            return Status::InputError;
        }
    };
    match commands::execute(&cli, out) {
        Ok(status) => status,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.status
        }
    }
}
