use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "capkm", version, about = "Bi-factor rounding for capacitated k-median and k-facility location")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random Euclidean instance.
    Generate(GenerateArgs),
    /// Solve an instance file and report every bound check.
    Solve(SolveArgs),
    /// Run algorithms over a grid of random instances.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Alg {
    /// Non-uniform capacities, k-median; violation 3 + 3ε.
    Nonuniform3e,
    /// Uniform capacities; violation 6.
    Match6,
    /// Uniform capacities; violation 2 + 3/(ℓ−1).
    Group2e,
}

impl Alg {
    pub fn id(self) -> &'static str {
        match self {
            Alg::Nonuniform3e => "nonuniform3e",
            Alg::Match6 => "match6",
            Alg::Group2e => "group2e",
        }
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("capacity").required(true).args(["uniform_cap", "nonuniform_cap"])))]
pub struct GenerateArgs {
    #[arg(long)]
    pub clients: usize,
    #[arg(long)]
    pub facilities: usize,
    #[arg(long)]
    pub k: usize,
    /// Same capacity for every facility.
    #[arg(long)]
    pub uniform_cap: Option<u64>,
    /// Capacities drawn from `lo:hi`.
    #[arg(long, value_name = "LO:HI")]
    pub nonuniform_cap: Option<String>,
    /// Opening costs drawn from `lo:hi` (whole units, cent resolution).
    /// Zero when absent.
    #[arg(long, value_name = "LO:HI")]
    pub cost: Option<String>,
    /// Place points around this many cluster centers.
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub spread: f64,
    #[arg(long, env = "CAPKM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub alg: Alg,
    /// ε for nonuniform3e; for group2e it picks ℓ = 1 + ⌈3/ε⌉ unless --ell is
    /// given.
    #[arg(long, default_value = "0.5")]
    pub eps: String,
    /// Bundle parameter ℓ ≥ 2 (match6 requires 2).
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, env = "CAPKM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the key=value report here.
    #[arg(long, value_name = "FILE")]
    pub kv: Option<PathBuf>,
    /// Write the JSON sidecar here.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Print the key=value report instead of the table.
    #[arg(long)]
    pub machine: bool,
    /// Dump the LP relaxation in CPLEX LP format.
    #[arg(long, value_name = "FILE")]
    pub dump_lp: Option<PathBuf>,
    /// Dump bundles and star instances.
    #[arg(long, value_name = "FILE")]
    pub dump_stars: Option<PathBuf>,
    /// Dump the star trees with matching or groups (uniform algorithms).
    #[arg(long, value_name = "FILE")]
    pub dump_trees: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instances per cell.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, value_delimiter = ',', default_value = "20")]
    pub clients: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub facilities: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub k: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "nonuniform3e,match6,group2e")]
    pub algs: Vec<Alg>,
    /// ε grid (nonuniform3e).
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub eps: Vec<String>,
    /// ℓ grid (nonuniform3e and group2e).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub ell: Vec<usize>,
    /// Rounding seeds per instance.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long, env = "CAPKM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the table as JSON here.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}
