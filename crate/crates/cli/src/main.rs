//! Command-line front end: sample oracles, inspect collision profiles and
//! hybrid chains, measure distinguisher bias, and run the claim checks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use rprf_core::harness::{
    fit_exponent, points_from_csv, rows_to_csv, run_single, run_sweep, verify_claims, write_csv,
    DistinguisherKind, PartialConfig, CSV_HEADER,
};
use rprf_core::{
    build_hybrids, profile_of, sample_uniform_function, sample_uniform_permutation, seeded_rng,
    CollisionProfile, FunctionTable,
};

#[derive(Parser)]
#[command(
    name = "rprf",
    about = "Query experiments telling random functions from random permutations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    /// Uniform random function.
    Rf,
    /// Uniform random permutation.
    Rp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Birthday,
    Bht,
}

impl From<Kind> for DistinguisherKind {
    fn from(kind: Kind) -> Self {
        match kind {
            Kind::Birthday => Self::Birthday,
            Kind::Bht => Self::Bht,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a function table and print it
    SampleFunction {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        dist: Dist,
        #[arg(long)]
        seed: u64,
    },
    /// Collision profile of a function table, with maxload and goodness
    Profile {
        /// Function table file, as printed by sample-function
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Hybrid profile chain interpolating from a permutation to a profile
    Hybrids {
        /// Collision profile file, as printed by profile
        #[arg(long = "in")]
        input: PathBuf,
        /// Threshold exponent separating small from large multiplicities
        #[arg(long, default_value_t = 0.6)]
        d: f64,
    },
    /// Measure one distinguisher bias point, printed as a CSV row
    Run {
        #[arg(long, value_enum)]
        distinguisher: Kind,
        #[arg(long)]
        n: usize,
        /// Total query budget; bht splits it between table and search
        #[arg(long)]
        budget: u64,
        /// Table size for bht (default: half the budget)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Run a bias sweep described by a config file and/or flags; flags win
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        distinguisher: Option<Kind>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        budget: Option<Vec<u64>>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        d: Option<f64>,
        /// CSV destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a scaling exponent to threshold-budget data
    Fit {
        /// CSV file: either n,threshold pairs or sweep output
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Statistical checks of the core claims; exits 0 iff all pass
    VerifyClaims {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::SampleFunction { n, dist, seed } => {
            let mut rng = seeded_rng(seed);
            let table = match dist {
                Dist::Rf => sample_uniform_function(n, &mut rng)?,
                Dist::Rp => sample_uniform_permutation(n, &mut rng)?,
            };
            print!("{}", table.to_text());
        }
        Command::Profile { input } => {
            let table = FunctionTable::from_text(&read(&input)?)?;
            let profile = profile_of(&table);
            print!("{}", profile.to_text());
            println!("# maxload {}", profile.maxload());
            match CollisionProfile::goodness_threshold(profile.n()) {
                Ok(threshold) => println!(
                    "# good {} (threshold {threshold:.4})",
                    profile.is_good()?
                ),
                Err(_) => println!("# good n/a (needs n >= 4)"),
            }
        }
        Command::Hybrids { input, d } => {
            let profile = CollisionProfile::from_text(&read(&input)?)?;
            let chain = build_hybrids(&profile, d)?;
            println!("# n = {}, d = {d}, q = {}", profile.n(), chain.q());
            for (j, hybrid) in chain.profiles().iter().enumerate() {
                println!("# H{j}");
                print!("{}", hybrid.to_text());
                println!();
            }
        }
        Command::Run { distinguisher, n, budget, k, trials, seed } => {
            let row = run_single(distinguisher.into(), n, budget, k, trials, seed, 0)?;
            println!("{CSV_HEADER}");
            println!("{}", row.to_csv_line());
        }
        Command::Sweep { config, distinguisher, n, budget, k, trials, seed, d, out } => {
            let from_file = match &config {
                Some(path) => PartialConfig::from_text(&read(path)?)?,
                None => PartialConfig::default(),
            };
            let from_flags = PartialConfig {
                distinguisher: distinguisher.map(Into::into),
                n_values: n,
                budgets: budget,
                k,
                trials,
                seed,
                d,
                out,
            };
            let cfg = from_flags.or(from_file).build()?;
            let rows = run_sweep(&cfg)?;
            match &cfg.out {
                Some(path) => {
                    write_csv(path, &rows)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{}", rows_to_csv(&rows)),
            }
        }
        Command::Fit { input } => {
            let points = points_from_csv(&read(&input)?)?;
            let fit = fit_exponent(&points)?;
            println!("points = {}", points.len());
            println!("slope = {}", fit.slope);
            println!("intercept = {}", fit.intercept);
            println!("r2 = {}", fit.r_squared);
        }
        Command::VerifyClaims { n, trials, seed } => {
            let report = verify_claims(n, trials, seed)?;
            println!("{report}");
            if !report.all_passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
