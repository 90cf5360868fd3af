use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torsionlab_core::{IntegerMatrix, PeripheralData};

use crate::Failure;

#[derive(Parser)]
#[command(name = "torsionlab", version, about = "Torsion in homology: exact computations and numeric checks")]
pub struct Cli {
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Integer homology of a complex, or relative homology of a pair file.
    Homology {
        path: PathBuf,
        /// Highest degree reported; defaults to the dimension of the complex.
        #[arg(long)]
        degrees: Option<usize>,
    },
    /// Run a randomized or exhaustive verification suite.
    Verify(VerifyArgs),
    /// Thick-thin and packing constants as one JSON document.
    Constants {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "0.1")]
        margulis_eps: String,
        #[arg(long, default_value_t = 2)]
        margulis_m: u64,
        /// Include the figure-eight volume.
        #[arg(long)]
        m8: bool,
        /// Evaluate c and D for this delta.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// First homology of one Dehn filling.
    DehnFill {
        /// Meridian image, comma-separated.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        mu: String,
        /// Longitude image, comma-separated.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        /// `none`, or relation rows separated by `;` with comma-separated entries.
        #[arg(long, default_value = "none", allow_hyphen_values = true)]
        relations: String,
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long, allow_negative_numbers = true)]
        q: i64,
    },
    /// Figure-eight fillings over ranges of slopes, one JSON line per slope.
    DehnTable {
        /// Inclusive range `a..b`.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Nerve of a ball cover with its homology.
    Nerve {
        path: PathBuf,
        #[arg(long)]
        max_dim: Option<usize>,
        #[arg(long)]
        degrees: Option<usize>,
    },
    /// Displacement of each isometry in a file at a point.
    Displacement {
        path: PathBuf,
        /// Hyperboloid coordinates, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Torsion schedule p_n for volumes v_n = a..b.
    Schedule {
        /// Target in [0, inf]; `inf` is accepted.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "10..10000")]
        volumes: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Soule,
    DvBound,
    Nerve,
    Obtuse,
    Orbit,
    Commutator,
    Displacement,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Number of instances; each suite has its own default.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dimension for the commutator suite.
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    /// Sample points per pair in the obtuse suite.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

/// `a..b`, `a..=b` (both inclusive) or a single integer.
pub fn range(s: &str) -> Result<RangeInclusive<i64>, Failure> {
    let bad = || Failure::Usage(format!("expected an integer range like 1..50, got {s:?}"));
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let x = parse(s)?;
            (x, x)
        }
    };
    if lo > hi {
        return Err(Failure::Usage(format!("empty range {s:?}")));
    }
    Ok(lo..=hi)
}

fn int_list(s: &str, what: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad integer {t:?} in {what}"))))
        .collect()
}

pub fn peripheral(mu: &str, lambda: &str, relations: &str) -> Result<PeripheralData, Failure> {
    let mu = int_list(mu, "--mu")?;
    let lambda = int_list(lambda, "--lambda")?;
    let rows: Vec<Vec<i64>> = if relations.trim() == "none" {
        Vec::new()
    } else {
        relations.split(';').map(|r| int_list(r, "--relations")).collect::<Result<_, _>>()?
    };
    let n = mu.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Failure::Usage(format!("relation {r:?} has {} entries, expected {n}", r.len())));
    }
    let core = if rows.is_empty() { IntegerMatrix::zeros(0, n) } else { IntegerMatrix::from_rows(&rows) };
    Ok(PeripheralData::new(core, mu, lambda)?)
}
