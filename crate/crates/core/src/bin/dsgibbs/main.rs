//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 numeric failure,
//! 4 sampling budget exhausted, 1 output I/O failure.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dsgibbs",
    version,
    about = "Two-category Dempster-Shafer chain toolkit"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

/// Options shared by every subcommand. Identical configs, subcommands and
/// arguments produce byte-identical output.
#[derive(Debug, Args)]
struct RunConfig {
    /// Master seed; replicate `i` uses stream `i` of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Replicate count for `chain` (default 10000) and flat-prior `coupon` (default 2000).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    replicates: Option<u64>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the chain and tabulate means, empirical W1 and analytic bounds.
    Chain {
        n1: u32,
        n2: u32,
        #[arg(allow_negative_numbers = true)]
        z0: f64,
        t_max: u32,
        /// Also write every state as `replicate,t,z` CSV to this path.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Rejection-sample the feasible set and test upper endpoints against Beta(N1+1, N2).
    Oracle {
        /// Category counts; alternatively use --labels.
        #[arg(num_args = 0..=2)]
        counts: Vec<u32>,
        /// File with one label (1 or 2) per line.
        #[arg(long, conflicts_with = "counts")]
        labels: Option<PathBuf>,
        #[arg(short = 'n', long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = dsgibbs::oracle::DEFAULT_MAX_ATTEMPTS)]
        max_attempts: u64,
        /// Also write the endpoint samples as `replicate,t,z` CSV to this path.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Lower and upper probabilities of `lo <= θ_j <= hi` from oracle samples.
    Ds {
        labels: PathBuf,
        /// 1-based coordinate index.
        j: usize,
        lo: f64,
        hi: f64,
        #[arg(short = 'n', long, default_value_t = 10_000)]
        samples: usize,
        /// Number of categories (default: largest label, at least 2).
        #[arg(long)]
        categories: Option<usize>,
        #[arg(long, default_value_t = dsgibbs::oracle::DEFAULT_MAX_ATTEMPTS)]
        max_attempts: u64,
    },
    /// Probability that all balls land in distinct boxes.
    Birthday(CountArgs),
    /// Probability that every box is occupied.
    Coupon(CountArgs),
}

#[derive(Debug, Args)]
struct CountArgs {
    /// Number of boxes.
    #[arg(allow_negative_numbers = true)]
    k: i64,
    /// `<N> <METHOD>`, or just `<METHOD>` with --find-half. METHOD is classical or flat-prior.
    #[arg(allow_negative_numbers = true, num_args = 1..=2, required = true)]
    rest: Vec<String>,
    /// Report the adjacent pair of N values straddling probability 0.5.
    #[arg(long)]
    find_half: bool,
    /// Fill in runtime_ms (makes output vary between runs).
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 0 for --help/--version and 2 for usage errors.
        Err(e) => e.exit(),
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("dsgibbs: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
