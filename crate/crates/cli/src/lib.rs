//! Command-line front end: instance generation, solving with a full bound
//! report, and benchmark sweeps.

pub mod args;
pub mod bench;
pub mod generate;
pub mod report;
pub mod solve;

use args::{Cli, Command, SolveArgs};
use std::fs;
use std::path::Path;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_BOUND_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags, unreadable or incompatible input.
    Usage(String),
    /// A guarantee broke inside a pipeline.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_BOUND_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "failure: {m}"),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> Result<capkm_core::Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    capkm_core::load_instance(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn cmd_solve(args: &SolveArgs, out: &mut String) -> Result<bool, CliError> {
    let inst = read_instance(&args.instance)?;
    let params = solve::Params { alg: args.alg, eps: solve::parse_eps(&args.eps)?, ell: args.ell, seed: args.seed };
    if let Some(p) = &args.dump_lp {
        write_file(p, &capkm_core::lp::to_lp_format(&capkm_core::lp::build_ckfl_lp(&inst)))?;
    }
    let solved = solve::solve(&inst, &params)?;
    if let Some(p) = &args.dump_stars {
        write_file(p, &capkm_core::bundling::dump_stars(&inst, &solved.prepared.stars))?;
    }
    if let (Some(p), Some(t)) = (&args.dump_trees, &solved.trees) {
        write_file(p, t)?;
    }
    if let Some(p) = &args.kv {
        write_file(p, &solved.report.to_kv(true))?;
    }
    if let Some(p) = &args.json {
        write_file(p, &report::sidecar(&solved.report, &solved.pipeline))?;
    }
    out.push_str(&if args.machine { solved.report.to_kv(true) } else { solved.report.to_table() });
    Ok(solved.report.passed)
}

/// Runs one command, appending its standard output to `out`. `Ok(false)`
/// means some bound check failed.
pub fn run(cli: &Cli, out: &mut String) -> Result<bool, CliError> {
    match &cli.command {
        Command::Generate(a) => {
            let text = generate::generate(a)?;
            match &a.out {
                Some(p) => write_file(p, &text)?,
                None => out.push_str(&text),
            }
            Ok(true)
        }
        Command::Solve(a) => cmd_solve(a, out),
        Command::Bench(a) => {
            let table = bench::bench(a)?;
            out.push_str(&table.render());
            if let Some(p) = &a.json {
                write_file(p, &(serde_json::to_string_pretty(&table).expect("table serializes") + "\n"))?;
            }
            Ok(table.passed())
        }
    }
}
