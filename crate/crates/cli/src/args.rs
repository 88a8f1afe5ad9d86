use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowdigit::construct::{Construction, DEFAULT_SELF_CHECK_LIMIT};

#[derive(Debug, Parser)]
#[command(
    name = "lowdigit",
    version,
    about = "Lowest-digit extraction polynomials modulo prime powers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format; defaults to human for single results and csv for tables.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for exhaustive loops.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Run construction self-checks only when p^e is at most this.
    #[arg(long, global = true, default_value_t = DEFAULT_SELF_CHECK_LIMIT)]
    pub self_check_limit: u64,

    /// Accept primes above 257.
    #[arg(long, global = true)]
    pub trust_prime: bool,

    /// Lift the p^e ≤ 100000 cap on exhaustive subcommands.
    #[arg(long, global = true)]
    pub unsafe_cap: bool,

    /// Log timings to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lift,
    Hs15,
    ZeroFermat,
    ZeroMinimal,
    FermatReduced,
    MinimalReduced,
    OracleMinimal,
}

impl Method {
    /// The library construction, or `None` for the oracle witness.
    pub fn construction(self) -> Option<Construction> {
        Some(match self {
            Method::Lift => Construction::Lift,
            Method::Hs15 => Construction::Hs15,
            Method::ZeroFermat => Construction::ZeroFermat,
            Method::ZeroMinimal => Construction::ZeroMinimal,
            Method::FermatReduced => Construction::FermatReduced,
            Method::MinimalReduced => Construction::MinimalReduced,
            Method::OracleMinimal => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self.construction() {
            Some(c) => c.name(),
            None => "oracle-minimal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    LowestDigit,
    RemoveLowDigits,
    KeepLowDigits,
    Constant,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a polynomial and print it with its degree and self-check status.
    Construct {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u32,
        #[arg(long, value_enum, default_value = "fermat-reduced")]
        method: Method,
    },
    /// Check that a polynomial file extracts the lowest digit on all of Z/p^e.
    Verify {
        /// Polynomial record, or `-` for standard input.
        poly_file: PathBuf,
        /// Expected prime; must match the file when given.
        #[arg(long)]
        p: Option<u64>,
        /// Expected exponent; must match the file when given.
        #[arg(long)]
        e: Option<u32>,
    },
    /// Decide whether a target function is induced by a polynomial.
    Oracle {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u32,
        #[arg(long, value_enum, default_value = "lowest-digit")]
        target: Target,
        /// Digit count for the remove/keep targets.
        #[arg(long)]
        r: Option<u32>,
        /// Value of the constant target.
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        degree_cap: Option<usize>,
    },
    /// Emit the refutation that no polynomial removes r > 1 low digits.
    Impossible {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        e: u32,
    },
    /// Horner and baby-step/giant-step costs of every extractor.
    Bench {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u32,
    },
    /// Degree and cost comparison over a grid of (p, e).
    Table {
        #[arg(long, default_value_t = 7)]
        pmax: u64,
        #[arg(long, default_value_t = 4)]
        emax: u32,
    },
}
