use crate::args::{Alg, BenchArgs};
use crate::solve::{group_ell, parse_eps, solve, Params};
use crate::CliError;
use capkm_core::rational::{self, Rational};
use capkm_core::{gen_random, CapacityMode, CostMode, Instance};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write;
use std::time::Instant;

#[derive(Debug, Clone)]
struct Cell {
    alg: Alg,
    clients: usize,
    facilities: usize,
    k: usize,
    eps: Rational,
    eps_text: String,
    ell: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CellResult {
    pub alg: String,
    pub clients: usize,
    pub facilities: usize,
    pub k: usize,
    pub param: String,
    pub runs: usize,
    /// Runs that ended in an error instead of a report.
    pub errors: usize,
    pub failed_runs: usize,
    pub max_violation: f64,
    pub mean_violation: f64,
    pub violation_bound: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub cost_factor: f64,
    pub seconds: f64,
}

impl CellResult {
    pub fn passed(&self) -> bool {
        self.errors == 0 && self.failed_runs == 0
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BenchTable {
    pub cells: Vec<CellResult>,
}

impl BenchTable {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(CellResult::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<13} {:>4} {:>4} {:>3} {:<10} {:>5} {:>4} {:>9} {:>9} {:>7} {:>9} {:>9} {:>8} {:>8} {}\n",
            "alg", "n", "m", "k", "param", "runs", "err", "max_viol", "mean_viol", "bound", "max_ratio", "mean_ratio", "factor", "secs", "ok"
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:<13} {:>4} {:>4} {:>3} {:<10} {:>5} {:>4} {:>9.4} {:>9.4} {:>7.3} {:>9.3} {:>9.3} {:>8.1} {:>8.2} {}",
                c.alg,
                c.clients,
                c.facilities,
                c.k,
                c.param,
                c.runs,
                c.errors,
                c.max_violation,
                c.mean_violation,
                c.violation_bound,
                c.max_ratio,
                c.mean_ratio,
                c.cost_factor,
                c.seconds,
                if c.passed() { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

fn cells(args: &BenchArgs) -> Result<Vec<Cell>, CliError> {
    let eps: Vec<(Rational, String)> = args.eps.iter().map(|t| parse_eps(t).map(|v| (v, t.clone()))).collect::<Result<_, _>>()?;
    let mut algs = args.algs.clone();
    algs.sort();
    algs.dedup();
    let mut out = Vec::new();
    for &alg in &algs {
        for &clients in &args.clients {
            for &facilities in &args.facilities {
                for &k in &args.k {
                    let base = |eps: &(Rational, String), ell| Cell {
                        alg,
                        clients,
                        facilities,
                        k,
                        eps: eps.0.clone(),
                        eps_text: eps.1.clone(),
                        ell,
                    };
                    match alg {
                        Alg::Nonuniform3e => {
                            for e in &eps {
                                for &l in &args.ell {
                                    out.push(base(e, Some(l)));
                                }
                            }
                        }
                        Alg::Match6 => {
                            if let Some(e) = eps.first() {
                                out.push(base(e, Some(2)));
                            }
                        }
                        Alg::Group2e => {
                            if let Some(e) = eps.first() {
                                for &l in &args.ell {
                                    out.push(base(e, Some(l)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The instance family a cell draws from: non-uniform capacities without
/// opening costs for `nonuniform3e`, uniform capacities with costs otherwise.
pub fn bench_instance(alg: Alg, clients: usize, facilities: usize, k: usize, seed: u64) -> capkm_core::Result<Instance> {
    let per = clients.div_ceil(k.max(1)) as u64;
    match alg {
        Alg::Nonuniform3e => gen_random(clients, facilities, k, CapacityMode::Nonuniform { lo: 1, hi: 2 * per }, CostMode::Zero, seed),
        Alg::Match6 | Alg::Group2e => {
            gen_random(clients, facilities, k, CapacityMode::Uniform(per + per / 2), CostMode::Range { lo: 0, hi: 1 }, seed)
        }
    }
}

struct Outcome {
    violation: f64,
    ratio: f64,
    bound: f64,
    factor: f64,
    passed: bool,
}

fn run_one(cell: &Cell, r: usize, s: usize, base_seed: u64) -> Option<Outcome> {
    let inst = bench_instance(cell.alg, cell.clients, cell.facilities, cell.k, base_seed + r as u64).ok()?;
    let params = Params { alg: cell.alg, eps: cell.eps.clone(), ell: cell.ell, seed: base_seed + s as u64 };
    let solved = solve(&inst, &params).ok()?;
    let rep = solved.report;
    Some(Outcome {
        violation: rep.max_violation,
        ratio: rep.cost_ratio,
        bound: rep.violation_bound,
        factor: rep.cost_factor,
        passed: rep.passed,
    })
}

pub fn bench(args: &BenchArgs) -> Result<BenchTable, CliError> {
    let grid = if args.count == 0 { Vec::new() } else { cells(args)? };
    let seeds = args.seeds.max(1);
    let jobs: Vec<(usize, usize, usize)> = (0..grid.len())
        .flat_map(|c| {
            let per_instance = if grid[c].alg == Alg::Nonuniform3e { 1 } else { seeds };
            (0..args.count).flat_map(move |r| (0..per_instance).map(move |s| (c, r, s)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let results: Vec<(usize, Option<Outcome>, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r, s)| {
                let t = Instant::now();
                let o = run_one(&grid[c], r, s, args.seed);
                (c, o, t.elapsed().as_secs_f64())
            })
            .collect()
    });

    let mut table = BenchTable::default();
    for (c, cell) in grid.iter().enumerate() {
        let ell = match cell.alg {
            Alg::Group2e => group_ell(&cell.eps, cell.ell),
            _ => cell.ell.unwrap_or(2),
        };
        let param = match cell.alg {
            Alg::Nonuniform3e => format!("e={},l={ell}", cell.eps_text),
            Alg::Match6 => "l=2".into(),
            Alg::Group2e => format!("l={ell}"),
        };
        let mut res = CellResult {
            alg: cell.alg.id().into(),
            clients: cell.clients,
            facilities: cell.facilities,
            k: cell.k,
            param,
            ..Default::default()
        };
        let (mut sum_v, mut sum_r, mut ok) = (0.0, 0.0, 0usize);
        for (_, o, secs) in results.iter().filter(|(rc, _, _)| *rc == c) {
            res.runs += 1;
            res.seconds += secs;
            match o {
                None => res.errors += 1,
                Some(o) => {
                    ok += 1;
                    sum_v += o.violation;
                    sum_r += o.ratio;
                    res.max_violation = res.max_violation.max(o.violation);
                    res.max_ratio = res.max_ratio.max(o.ratio);
                    res.violation_bound = o.bound;
                    res.cost_factor = o.factor;
                    res.failed_runs += (!o.passed) as usize;
                }
            }
        }
        if ok > 0 {
            res.mean_violation = sum_v / ok as f64;
            res.mean_ratio = sum_r / ok as f64;
        }
        if res.violation_bound == 0.0 {
            res.violation_bound = rational::to_f64(&match cell.alg {
                Alg::Nonuniform3e => capkm_core::nonuniform::violation_bound(&cell.eps),
                Alg::Match6 => rational::int(capkm_core::uniform::MATCH6_VIOLATION),
                Alg::Group2e => capkm_core::uniform::group_gamma(ell),
            });
        }
        table.cells.push(res);
    }
    Ok(table)
}
