use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "paradet", version, about = "Paratrophic determinants over Z/NZ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one matrix and assemble its determinant from factors.
    Det(Common),
    /// Run the factorization against its oracle over a range of N.
    Verify(Common),
    /// Exact integer checks on the tangent sign matrices, odd N only.
    Sun(Common),
    /// Time the dense determinant against the factorized one.
    Bench(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    X,
    Y,
    Z,
    Bernoulli,
    Tan,
    Transforms,
}

impl FamilyArg {
    pub fn tag(self) -> &'static str {
        match self {
            FamilyArg::X => "x",
            FamilyArg::Y => "y",
            FamilyArg::Z => "z",
            FamilyArg::Bernoulli => "bernoulli",
            FamilyArg::Tan => "tan",
            FamilyArg::Transforms => "transforms",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Single modulus.
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Inclusive modulus range `a..b`.
    #[arg(long = "N-range", value_parser = parse_range)]
    pub n_range: Option<RangeInclusive<u64>>,
    #[arg(long, value_enum, default_value = "bernoulli")]
    pub family: FamilyArg,
    /// Bernoulli index, a value or an inclusive range `a..b`.
    #[arg(long, value_parser = parse_range)]
    pub k: Option<RangeInclusive<u64>>,
    /// Tangent exponent, a value or an inclusive range `a..b`.
    #[arg(long, value_parser = parse_range)]
    pub m: Option<RangeInclusive<u64>>,
    /// Working precision in bits; checks also run at 128 bits more.
    #[arg(long, env = "PARADET_PRECISION", default_value_t = 256)]
    pub precision: u32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the random `x`, `y`, `z` assignments.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random assignments per modulus for `x`, `y`, `z` sweeps.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Include the matrix in the `det` report.
    #[arg(long)]
    pub dump_matrix: bool,
    /// Run without the thread pool.
    #[arg(long)]
    pub sequential: bool,
}

/// `a..b` (inclusive), `a..=b`, or a single value.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    let r = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let v = parse(s)?;
            v..=v
        }
    };
    if r.is_empty() {
        return Err(format!("empty range {s}"));
    }
    Ok(r)
}
