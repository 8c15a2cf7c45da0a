use crate::args::Alg;
use crate::report::{instance_digest, ratio, stage, RunReport};
use crate::CliError;
use capkm_core::bounds::BoundCheck;
use capkm_core::lp::solve_ckfl;
use capkm_core::nonuniform::{cost_factor, run_nonuniform, violation_bound};
use capkm_core::oracle::verify_solution;
use capkm_core::rational::{self, int, Rational};
use capkm_core::uniform::{run_group, run_match6, GroupedTree, StarForest, MATCH6_COST_FACTOR, MATCH6_VIOLATION};
use capkm_core::{prepare, Error, Instance, IntegralSolution, Prepared};
use std::fmt::Write;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct Params {
    pub alg: Alg,
    pub eps: Rational,
    pub ell: Option<usize>,
    pub seed: u64,
}

pub struct Solved {
    pub report: RunReport,
    pub pipeline: serde_json::Value,
    pub prepared: Prepared,
    /// Star trees with matching or groups; uniform algorithms only.
    pub trees: Option<String>,
}

pub fn parse_eps(text: &str) -> Result<Rational, CliError> {
    match rational::parse(text) {
        Some(v) if v > rational::zero() => Ok(v),
        _ => Err(CliError::Usage(format!("eps must be a positive number, got `{text}`"))),
    }
}

/// ℓ for the group algorithm: the given one, else the smallest with
/// 3/(ℓ−1) ≤ ε.
pub fn group_ell(eps: &Rational, ell: Option<usize>) -> usize {
    ell.unwrap_or_else(|| 1 + rational::ceil_usize(&(int(3) / eps)))
}

fn pipeline_error(e: Error) -> CliError {
    match e {
        Error::Invariant(_) | Error::Solver(_) | Error::Rounding(_) => CliError::Failed(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

/// Runs `params.alg` on `inst` and gathers every bound check plus a verifier
/// pass over the final solution.
pub fn solve(inst: &Instance, params: &Params) -> Result<Solved, CliError> {
    let start = Instant::now();
    let ell = match params.alg {
        Alg::Nonuniform3e => params.ell.unwrap_or(2),
        Alg::Match6 => match params.ell {
            None | Some(2) => 2,
            Some(l) => return Err(CliError::Usage(format!("match6 runs with ell = 2, got {l}"))),
        },
        Alg::Group2e => group_ell(&params.eps, params.ell),
    };
    if ell < 2 {
        return Err(CliError::Usage(format!("ell must be at least 2, got {ell}")));
    }
    match params.alg {
        Alg::Nonuniform3e if !inst.is_k_median() => {
            return Err(CliError::Usage("nonuniform3e needs zero opening costs".into()));
        }
        Alg::Match6 | Alg::Group2e if inst.uniform_capacity().is_none() => {
            return Err(CliError::Usage(format!("{} needs uniform capacities", params.alg.id())));
        }
        _ => {}
    }
    let frac = solve_ckfl(inst).map_err(pipeline_error)?;
    let prepared = prepare(inst, frac, ell).map_err(pipeline_error)?;
    let lp = prepared.frac.value.clone();

    let (solution, mut checks, stages, gamma, factor, pipeline, trees, eps, seed);
    match params.alg {
        Alg::Nonuniform3e => {
            let run = run_nonuniform(inst, &prepared, &params.eps).map_err(pipeline_error)?;
            let r = &run.report;
            stages = vec![
                stage("transport", &r.transport_cost),
                stage("consolidation", &r.consolidation_cost),
                stage("interval", &r.interval_cost),
                stage("snap_star_edges", &r.star_edge_sum),
                stage("rounding_reroute", &r.reroute_cost),
                stage("constructive", &r.constructive_cost),
                stage("final_flow", &r.final_stats.total_cost()),
            ];
            gamma = violation_bound(&params.eps);
            factor = cost_factor(&params.eps, ell);
            checks = r.checks.clone();
            pipeline = serde_json::to_value(r).expect("report serializes");
            solution = run.solution;
            trees = None;
            eps = Some(rational::format(&params.eps));
            seed = None;
        }
        Alg::Match6 => {
            let run = run_match6(inst, &prepared, params.seed).map_err(pipeline_error)?;
            let r = &run.report;
            stages = uniform_stages(r);
            gamma = int(MATCH6_VIOLATION);
            factor = int(MATCH6_COST_FACTOR);
            checks = r.checks.clone();
            pipeline = serde_json::to_value(r).expect("report serializes");
            trees = Some(dump_trees(inst, &run.trace.star_forest, &run.trace.open_nodes, Some(&run.trace.matching), None));
            solution = run.solution;
            eps = None;
            seed = Some(params.seed);
        }
        Alg::Group2e => {
            let run = run_group(inst, &prepared, params.seed).map_err(pipeline_error)?;
            let r = &run.report;
            stages = uniform_stages(r);
            gamma = r.gamma.clone();
            factor = r.cost_factor.clone();
            checks = r.checks.clone();
            pipeline = serde_json::to_value(r).expect("report serializes");
            let sf = &run.trace.star_forest;
            let open_nodes: Vec<bool> = (0..sf.forest.len())
                .map(|p| sf.stars[p].facilities.iter().any(|i| run.solution.open.binary_search(i).is_ok()))
                .collect();
            trees = Some(dump_trees(inst, sf, &open_nodes, None, Some(&run.trace.grouped)));
            solution = run.solution;
            eps = (params.ell.is_none()).then(|| rational::format(&params.eps));
            seed = Some(params.seed);
        }
    }

    let cost_bound = &factor * &lp;
    let verdict = verify_solution(inst, &solution, inst.k, &gamma, Some(&cost_bound));
    let findings: Vec<String> = verdict.findings.iter().map(|f| format!("{} {} {}", f.check, f.entity, f.detail)).collect();
    checks.push(BoundCheck::at_most("verifier_findings", int(findings.len() as i64), int(0)));
    let stats = verdict.stats.clone().unwrap_or_else(|| fallback_stats(&solution));
    let final_cost = stats.total_cost();
    let passed = checks.iter().all(|c| c.passed);

    let report = RunReport {
        instance_digest: instance_digest(inst),
        algorithm: params.alg.id().into(),
        eps,
        ell,
        seed,
        clients: inst.n_clients(),
        facilities: inst.n_facilities(),
        k: inst.k,
        lp_value: rational::to_f64(&lp),
        stages,
        final_cost: rational::to_f64(&final_cost),
        cost_ratio: ratio(&final_cost, &lp),
        cost_factor: rational::to_f64(&factor),
        max_violation: rational::to_f64(&stats.max_violation),
        violation_bound: rational::to_f64(&gamma),
        open_count: solution.open.len(),
        checks,
        findings,
        passed,
        wall_time_ms: start.elapsed().as_millis(),
    };
    Ok(Solved { report, pipeline, prepared, trees })
}

fn fallback_stats(sol: &IntegralSolution) -> capkm_core::SolutionStats {
    capkm_core::SolutionStats {
        connection_cost: rational::zero(),
        opening_cost: rational::zero(),
        max_violation: rational::zero(),
        open_count: sol.open.len(),
    }
}

fn uniform_stages(r: &capkm_core::uniform::UniformReport) -> Vec<crate::report::Stage> {
    let mut s = vec![
        stage("transport", &r.transport_cost),
        stage("star_budgets", &r.budget_total),
        stage("rounding_reroute", &r.reroute_cost),
    ];
    if let Some(c) = &r.constructive {
        s.push(stage("constructive", &c.total_cost()));
    }
    s.push(stage("final_flow", &r.final_stats.total_cost()));
    s
}

/// One line per tree node, then the matching pairs or the groups. Nodes are
/// named by their center's client id.
pub fn dump_trees(
    inst: &Instance,
    sf: &StarForest,
    open: &[bool],
    matching: Option<&[(usize, usize)]>,
    groups: Option<&GroupedTree>,
) -> String {
    let f = &sf.forest;
    let id = |p: usize| inst.client_ids[sf.stars[p].center].to_string();
    let mut out = String::from("node\tparent\tds\tvolume\tbig\tsons\topen\n");
    for p in 0..f.len() {
        let sons: Vec<String> = f.sons[p].iter().map(|&s| id(s)).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{:.9}\t{}\t{}\t{}\t{}",
            id(p),
            f.parent[p].map_or("-".into(), id),
            rational::to_f64(&f.ds[p]),
            rational::format(&sf.volume(p)),
            sf.is_big(p),
            if sons.is_empty() { "-".into() } else { sons.join(",") },
            open[p]
        );
    }
    if let Some(m) = matching {
        for &(a, b) in m {
            let _ = writeln!(out, "pair\t{}\t{}", id(a), id(b));
        }
    }
    if let Some(g) = groups {
        for (h, members) in g.groups.iter().enumerate() {
            let names: Vec<String> = members.iter().map(|&p| id(p)).collect();
            let parent = g.parent_group[h].map_or("-".into(), |q| q.to_string());
            let _ = writeln!(out, "group\t{h}\tparent {parent}\t{}", names.join(","));
        }
    }
    out
}
