//! `symbsm`: verification campaigns from the command line.
//!
//! Exit codes: 0 all checks pass, 1 usage or configuration error,
//! 2 verification failure, 3 a catalog formula is flagged as a suspected
//! misprint.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "symbsm",
    version,
    about = "Lie-symmetry and invariant-solution checks for the stochastic-volatility pricing equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every catalog generator against the determining equations.
    VerifySymmetries {
        #[command(flatten)]
        common: Common,
        /// Add a known non-symmetry to the catalog (harness self-test).
        #[arg(long, hide = true, value_parser = ["y-dy"])]
        inject: Option<String>,
    },
    /// Verify the commutator tables, antisymmetry and the Jacobi identity.
    Brackets {
        #[command(flatten)]
        common: Common,
    },
    /// Run the three-tier check on invariant solutions.
    Solutions {
        #[command(flatten)]
        common: Common,
        /// Grid points per axis for the sample CSVs written to --out.
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Finite-difference convergence study against an exact solution.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SchemeArg::Mcs)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Intervals per direction on the finest level.
        #[arg(long, default_value_t = 80)]
        finest: usize,
        /// First-order one-sided u_x stencil (harness self-test).
        #[arg(long, hide = true)]
        one_sided_ux: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Case selector: const, hyp or hyp-g0 for symmetry and bracket checks;
    /// a catalog id such as 2.1-1 for solutions; a catalog id, u=x or
    /// u=exp(rt) for converge. Repeatable.
    #[arg(long)]
    case: Vec<String>,
    /// Select every case.
    #[arg(long, conflicts_with = "case")]
    all: bool,
    /// TOML or JSON file of model parameters keyed by symbol name.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory for the JSON report and CSV artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SchemeArg {
    Mcs,
    Douglas,
    Explicit,
}

/// Outcome of a command; ordered so the worst one wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Failure,
    Misprint,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Failure => 2,
            Outcome::Misprint => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(o) => ExitCode::from(o.code()),
        Err(commands::CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(commands::CliError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
