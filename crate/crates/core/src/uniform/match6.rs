use super::matching::{is_matching, make_matching};
use super::startree::{build_star_forest, verify_star_tree, BinaryForest, StarForest, TreeCheck};
use super::{assign_through_stars, structural_errors, total_factor, UniformReport, UniformRun};
use crate::bounds::BoundCheck;
use crate::bundling::{prepare, total_budget, Prepared};
use crate::depround::{dependent_round, Schedule};
use crate::error::{Error, Result};
use crate::instance::{eval_solution, Instance, IntegralSolution};
use crate::lp::solve_ckfl;
use crate::oracle::min_cost_assignment;
use crate::rational::{self, int, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MATCH6_VIOLATION: i64 = 6;
/// `2ℓ + 2 + 38·(2ℓ + 1)` at `ℓ = 2`.
pub const MATCH6_COST_FACTOR: i64 = 196;

#[derive(Debug, Clone, PartialEq)]
pub struct Match6Trace {
    pub star_forest: StarForest,
    pub tree_check: TreeCheck,
    pub matching: Vec<(usize, usize)>,
    pub open_nodes: Vec<bool>,
    /// Destination node of each closed node.
    pub targets: Vec<Option<usize>>,
    pub constructive: IntegralSolution,
}

/// Destination of every closed node: a closed tree root sends to its left
/// son, any other closed node to the first open node among its father, its
/// left brother and its grandfather.
pub fn route_closed(forest: &BinaryForest, open: &[bool]) -> Result<Vec<Option<usize>>> {
    let mut targets = vec![None; forest.len()];
    for j in (0..forest.len()).filter(|&j| !open[j]) {
        let candidates = match forest.parent[j] {
            None => vec![forest.left(j)],
            Some(p) => vec![Some(p), forest.left_brother(j), forest.grandparent(j)],
        };
        let t = candidates
            .into_iter()
            .flatten()
            .find(|&t| open[t])
            .ok_or_else(|| Error::Invariant(format!("closed tree node {j} has no open node to route to")))?;
        targets[j] = Some(t);
    }
    Ok(targets)
}

/// Node loads: own demand at open nodes plus the demand routed in.
pub fn star_loads(demand: &[Rational], open: &[bool], targets: &[Option<usize>]) -> Vec<Rational> {
    let mut load = vec![rational::zero(); demand.len()];
    for j in 0..demand.len() {
        let at = if open[j] { j } else { targets[j].expect("closed node has a target") };
        load[at] += &demand[j];
    }
    load
}

/// Number of edges between `a` and `b` ignoring directions; `None` across
/// trees.
pub fn tree_hops(forest: &BinaryForest, a: usize, b: usize) -> Option<usize> {
    let up = |mut j: usize| {
        let mut path = vec![j];
        while let Some(p) = forest.parent[j] {
            path.push(p);
            j = p;
        }
        path
    };
    let (pa, pb) = (up(a), up(b));
    pa.iter()
        .enumerate()
        .find_map(|(ia, x)| pb.iter().position(|y| y == x).map(|ib| ia + ib))
}

/// Solves the LP and runs [`run_match6`] with `ℓ = 2`.
pub fn solve_kfl_match6(inst: &Instance, seed: u64) -> Result<UniformRun<Match6Trace>> {
    let frac = solve_ckfl(inst)?;
    let prep = prepare(inst, frac, 2)?;
    run_match6(inst, &prep, seed)
}

pub fn run_match6(inst: &Instance, prep: &Prepared, seed: u64) -> Result<UniformRun<Match6Trace>> {
    if prep.ell() != 2 {
        return Err(Error::Contract(format!("match6 needs ell = 2, got {}", prep.ell())));
    }
    let sf = build_star_forest(inst, prep)?;
    let tree_check = verify_star_tree(inst, &sf);
    structural_errors(&tree_check)?;
    let f = &sf.forest;
    let nodes = f.len();
    let lp = prep.frac.value.clone();
    let mut checks = Vec::new();
    checks.push(BoundCheck::at_most("budget_total", total_budget(&prep.stars), int(5) * &lp));
    checks.push(BoundCheck::at_most("transport_cost", prep.transport.total_cost.clone(), int(6) * &lp));

    let big: Vec<bool> = (0..nodes).map(|p| sf.is_big(p)).collect();
    let small: Vec<usize> = (0..nodes).filter(|&p| !big[p]).collect();
    let keep: Vec<bool> = big.iter().map(|b| !b).collect();
    let matching = make_matching(f, &keep);
    if !is_matching(&matching, nodes) {
        return Err(Error::Invariant("matching uses a node twice".into()));
    }
    let mut entry = vec![usize::MAX; nodes];
    for (e, &p) in small.iter().enumerate() {
        entry[p] = e;
    }
    let values: Vec<Rational> = small.iter().map(|&p| sf.volume(p)).collect();
    let pairs = matching.iter().map(|&(a, b)| (entry[a], entry[b])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounded = dependent_round(&values, &Schedule::MatchedPairsFirst(pairs), &mut rng)?;

    let mut open_nodes = vec![false; nodes];
    let mut open = Vec::new();
    let mut facilities_of: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for p in 0..nodes {
        let star = &sf.stars[p];
        let z = &sf.openings[p].z;
        for q in 0..z.len() {
            let on = if big[p] { z[q] == rational::one() } else { z[q] > rational::zero() && rounded.open[entry[p]] };
            if on {
                facilities_of[p].push(star.facilities[q]);
            }
        }
        // A tree made of one small star has nowhere to send its demand.
        if !big[p] && f.parent[p].is_none() && f.sons[p].is_empty() && facilities_of[p].is_empty() {
            let q = sf.support(p)[0];
            facilities_of[p].push(star.facilities[q]);
        }
        open_nodes[p] = !facilities_of[p].is_empty();
        open.extend(facilities_of[p].iter().copied());
    }
    open.sort_unstable();
    let pairs_without_open = matching.iter().filter(|&&(a, b)| !open_nodes[a] && !open_nodes[b]).count();
    checks.push(BoundCheck::at_most("matched_pairs_without_open", int(pairs_without_open as i64), int(0)));
    checks.push(BoundCheck::at_most("open_count", int(open.len() as i64), int(inst.k as i64)));

    let targets = route_closed(f, &open_nodes)?;
    let mut max_hops = 0;
    let mut reroute_cost = rational::zero();
    for p in 0..nodes {
        if let Some(t) = targets[p] {
            let hops = tree_hops(f, p, t).ok_or_else(|| Error::Invariant("routing left the tree".into()))?;
            max_hops = max_hops.max(hops);
            reroute_cost += &sf.stars[p].demand * inst.dq_cc(sf.stars[p].center, sf.stars[t].center);
        }
    }
    checks.push(BoundCheck::at_most("routing_hops", int(max_hops as i64), int(2)));

    let split: Vec<Vec<(usize, Rational)>> = (0..nodes)
        .map(|p| {
            let at = targets[p].unwrap_or(p);
            let share = rational::ratio(1, facilities_of[at].len() as i64);
            facilities_of[at].iter().map(|&i| (i, share.clone())).collect()
        })
        .collect();
    let constructive = assign_through_stars(inst, prep, open.clone(), &split)?;
    let constructive_stats = eval_solution(inst, &constructive)?;
    let gamma = int(MATCH6_VIOLATION);
    checks.push(BoundCheck::at_most("constructive_violation", constructive_stats.max_violation.clone(), gamma.clone()));

    let flow = min_cost_assignment(inst, &open, &gamma)?
        .ok_or_else(|| Error::Invariant("opened capacity below the demand at violation 6".into()))?;
    let solution = IntegralSolution { open, assign: flow.assign };
    let final_stats = eval_solution(inst, &solution)?;
    checks.push(BoundCheck::at_most("final_violation", final_stats.max_violation.clone(), gamma.clone()));
    if constructive_stats.max_violation <= gamma {
        checks.push(BoundCheck::at_most(
            "final_vs_constructive",
            final_stats.total_cost(),
            constructive_stats.total_cost(),
        ));
    }
    checks.push(BoundCheck::at_most("final_cost", final_stats.total_cost(), int(MATCH6_COST_FACTOR) * &lp));

    let report = UniformReport {
        algorithm: "match6",
        ell: 2,
        seed,
        lp_value: lp,
        gamma,
        cost_factor: total_factor(2, &int(38)),
        stars: nodes,
        big_stars: nodes - small.len(),
        trees: f.roots().len(),
        rerouting_nodes: tree_check.rerouting_nodes,
        rerouting_edge_failures: tree_check.count("iv"),
        rerouting_hop_failures: tree_check.count("hop"),
        star_budget_failures: tree_check.count("budget"),
        units: matching.len(),
        rounded_entries: small.len(),
        budget_total: total_budget(&prep.stars),
        budget_c: sf.budget_c(),
        transport_cost: prep.transport.total_cost.clone(),
        reroute_cost,
        constructive: Some(constructive_stats),
        final_stats,
        checks,
    };
    let trace = Match6Trace { star_forest: sf, tree_check, matching, open_nodes, targets, constructive };
    Ok(UniformRun { solution, report, trace })
}
