//! `symflow`: command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage error, 3 unreadable or
//! invalid input file, 4 target entropy out of range, 5 endpoint bracketing
//! failed, 6 matrix not irreducible, 7 verification failed.

mod commands;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use formats::ParseError;

#[derive(Parser)]
#[command(version, about = "Markov measures of prescribed entropy for suspension flows over SFTs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shift basics: irreducibility, period, Perron data and the Parry measure
    Info {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parry measure as a chain file
    Parry {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the entropy path, optionally solving for a target entropy
    Path {
        matrix: PathBuf,
        /// Number of grid points in [0, 1]
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long)]
        target_h: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Higher-block recoding
    Recode {
        matrix: PathBuf,
        /// Block length
        #[arg(short = 'n', long, default_value_t = 2)]
        block_len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constant-roof model and top-entropy bounds of the flow
    Flatten {
        matrix: PathBuf,
        roof: PathBuf,
        #[arg(long, default_value_t = symflow::synthesis::DEFAULT_ETA)]
        eta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an ergodic measure whose flow entropy is the target
    Synthesize {
        matrix: PathBuf,
        roof: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        target_h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a synthesis report, analytically and by Monte Carlo
    Verify {
        report: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a trajectory from the Parry measure of a matrix file or from
    /// the chain of a synthesis report
    Sample {
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Block length of the entropy estimate
        #[arg(long, default_value_t = 3)]
        block: usize,
        /// Include the first this many symbols of the trajectory
        #[arg(long, default_value_t = 64)]
        show: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Some verification check failed.
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ParseError>().is_some() {
        return 3;
    }
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return 7;
    }
    match err.downcast_ref::<symflow::Error>() {
        Some(symflow::Error::TargetOutOfRange { .. }) => 4,
        Some(symflow::Error::BracketFailure { .. }) => 5,
        Some(symflow::Error::NotIrreducible) => 6,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    use commands::*;
    match cli.command {
        Command::Info { matrix, out } => emit(&info(&matrix)?, out),
        Command::Parry { matrix, out } => emit(&parry(&matrix)?, out),
        Command::Path {
            matrix,
            points,
            target_h,
            tol,
            out,
        } => emit(&path(&matrix, points, target_h, tol)?, out),
        Command::Recode { matrix, block_len, out } => emit(&recode(&matrix, block_len)?, out),
        Command::Flatten { matrix, roof, eta, out } => emit(&flatten(&matrix, &roof, eta)?, out),
        Command::Synthesize {
            matrix,
            roof,
            target_h,
            tol,
            eta,
            out,
        } => emit(&synthesize(&matrix, &roof, target_h, tol, eta)?, out),
        Command::Verify {
            report,
            samples,
            seed,
            out,
        } => {
            let v = verify(&report, samples, seed)?;
            let failed = v.checks.iter().filter(|c| !c.pass).count();
            emit(&v, out)?;
            if failed > 0 {
                return Err(VerificationFailed(failed).into());
            }
            Ok(())
        }
        Command::Sample {
            input,
            samples,
            seed,
            block,
            show,
            out,
        } => emit(&sample(&input, samples, seed, block, show)?, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
