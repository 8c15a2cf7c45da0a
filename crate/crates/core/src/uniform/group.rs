use super::groups::{build_groups, check_groups, GroupedTree};
use super::startree::{build_star_forest, verify_star_tree, StarForest, TreeCheck};
use super::{assign_through_stars, structural_errors, total_factor, UniformReport, UniformRun};
use crate::bounds::BoundCheck;
use crate::bundling::{prepare, total_budget, Prepared};
use crate::depround::{dependent_round, Schedule};
use crate::error::{Error, Result};
use crate::instance::{eval_solution, Instance, IntegralSolution};
use crate::lp::simplex::{self, LinearProgram, Outcome, Sense};
use crate::lp::solve_ckfl;
use crate::oracle::min_cost_assignment;
use crate::rational::{self, int, Rational};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupTrace {
    pub star_forest: StarForest,
    pub tree_check: TreeCheck,
    pub grouped: GroupedTree,
    /// Opening vector over all fractional entries after the within-group phase.
    pub after_groups: Vec<Rational>,
    /// Star-level routing `(star, facility, amount)` used as the witness.
    pub routing: Option<Vec<(usize, usize, Rational)>>,
    pub constructive: Option<IntegralSolution>,
}

/// `2 + 3/(ℓ−1)`.
pub fn group_gamma(ell: usize) -> Rational {
    int(2) + rational::ratio(3, ell as i64 - 1)
}

/// `32ℓ² + 28ℓ + 7`.
pub fn group_cost_factor(ell: usize) -> Rational {
    let l = ell as i64;
    int(32 * l * l + 28 * l + 7)
}

pub fn solve_kfl_group(inst: &Instance, ell: usize, seed: u64) -> Result<UniformRun<GroupTrace>> {
    let frac = solve_ckfl(inst)?;
    let prep = prepare(inst, frac, ell)?;
    run_group(inst, &prep, seed)
}

/// Stars whose open facilities may serve star `s`: its own, earlier members
/// of its group, every star of the parent group for a small group root, and
/// the only son for a small tree root.
fn allowed_stars(sf: &StarForest, g: &GroupedTree, big: &[bool], s: usize) -> Vec<usize> {
    let mut out = vec![s];
    if big[s] {
        return out;
    }
    let h = g.group_of[s];
    let rank = g.rank(s);
    if rank > 0 {
        out.extend(&g.groups[h][..rank]);
    } else if let Some(ph) = g.parent_group[h] {
        out.extend(&g.groups[ph]);
    } else if let Some(son) = sf.forest.left(s) {
        out.push(son);
    }
    out
}

/// Cheapest star-level routing of every star's demand to open facilities of
/// allowed stars within `γ·u`. `None` when no such routing exists.
fn restricted_routing(
    inst: &Instance,
    sf: &StarForest,
    g: &GroupedTree,
    big: &[bool],
    open_of: &[Vec<usize>],
    gamma: &Rational,
) -> Result<Option<Vec<(usize, usize, Rational)>>> {
    let mut lp = LinearProgram::default();
    let mut arcs = Vec::new();
    let mut by_facility: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for s in 0..sf.stars.len() {
        let w = &sf.stars[s].demand;
        if *w == rational::zero() {
            continue;
        }
        let mut row = Vec::new();
        for t in allowed_stars(sf, g, big, s) {
            for &i in &open_of[t] {
                let v = lp.add_var(format!("f_{s}_{i}"), inst.dq(i, sf.stars[s].center).clone());
                arcs.push((s, i));
                row.push((v, rational::one()));
                by_facility.entry(i).or_default().push(v);
            }
        }
        if row.is_empty() {
            return Ok(None);
        }
        lp.add_row(format!("demand_{s}"), row, Sense::Eq, w.clone());
    }
    let cap = gamma * int(sf.u as i64);
    for (i, vars) in by_facility {
        lp.add_row(format!("cap_{i}"), vars.into_iter().map(|v| (v, rational::one())).collect(), Sense::Le, cap.clone());
    }
    if arcs.is_empty() {
        return Ok(Some(Vec::new()));
    }
    match simplex::solve_exact(&lp)? {
        Outcome::Optimal(sol) => Ok(Some(
            arcs.into_iter()
                .zip(sol.x)
                .filter(|(_, x)| *x != rational::zero())
                .map(|((s, i), x)| (s, i, x))
                .collect(),
        )),
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => Err(Error::Solver("bounded routing LP reported unbounded".into())),
    }
}

pub fn run_group(inst: &Instance, prep: &Prepared, seed: u64) -> Result<UniformRun<GroupTrace>> {
    let ell = prep.ell();
    let sf = build_star_forest(inst, prep)?;
    let tree_check = verify_star_tree(inst, &sf);
    structural_errors(&tree_check)?;
    let f = &sf.forest;
    let nodes = f.len();
    let lp = prep.frac.value.clone();
    let l = int(ell as i64);
    let mut checks = Vec::new();
    checks.push(BoundCheck::at_most("budget_total", total_budget(&prep.stars), (int(1) + int(2) * &l) * &lp));
    checks.push(BoundCheck::at_most("transport_cost", prep.transport.total_cost.clone(), (int(2) + int(2) * &l) * &lp));

    let grouped = build_groups(f, ell);
    if let Some(bad) = check_groups(f, &grouped).into_iter().next() {
        return Err(Error::Invariant(bad));
    }
    let big: Vec<bool> = (0..nodes).map(|p| sf.is_big(p)).collect();

    // One entry per fractional facility, listed along the group chains.
    let mut entries: Vec<(usize, usize)> = Vec::new();
    let mut chains = Vec::with_capacity(grouped.groups.len());
    for members in &grouped.groups {
        let mut chain = Vec::new();
        for &p in members {
            for q in sf.fractional(p) {
                chain.push(entries.len());
                entries.push((p, q));
            }
        }
        chains.push(chain);
    }
    let values: Vec<Rational> = entries.iter().map(|&(p, q)| sf.openings[p].z[q].clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounded = dependent_round(&values, &Schedule::GroupChains(chains.clone()), &mut rng)?;

    let mut over_fractional = 0usize;
    let mut sum_drift = 0usize;
    for chain in &chains {
        let left = chain.iter().filter(|&&e| rational::is_fractional(&rounded.after_schedule[e])).count();
        if left > 1 {
            over_fractional += 1;
        }
        let before = rational::sum(chain.iter().map(|&e| &values[e]));
        let after = rational::sum(chain.iter().map(|&e| &rounded.after_schedule[e]));
        if (after - before).abs() >= rational::one() {
            sum_drift += 1;
        }
    }
    checks.push(BoundCheck::at_most("groups_with_two_fractional", int(over_fractional as i64), int(0)));
    checks.push(BoundCheck::at_most("groups_sum_drift", int(sum_drift as i64), int(0)));

    let mut on: Vec<Vec<bool>> = sf.openings.iter().map(|o| o.z.iter().map(|z| *z == rational::one()).collect()).collect();
    for (e, &(p, q)) in entries.iter().enumerate() {
        on[p][q] = rounded.open[e];
    }
    let open_of: Vec<Vec<usize>> = (0..nodes)
        .map(|p| (0..on[p].len()).filter(|&q| on[p][q]).map(|q| sf.stars[p].facilities[q]).collect())
        .collect();
    let mut open: Vec<usize> = open_of.iter().flatten().copied().collect();
    open.sort_unstable();
    checks.push(BoundCheck::at_most("open_count", int(open.len() as i64), int(inst.k as i64)));
    let thin = (0..grouped.groups.len())
        .filter(|&h| !grouped.children(h).is_empty())
        .filter(|&h| grouped.groups[h].iter().map(|&p| open_of[p].len()).sum::<usize>() + 1 < ell)
        .count();
    checks.push(BoundCheck::at_most("inner_groups_below_ell_minus_one_open", int(thin as i64), int(0)));

    let gamma = group_gamma(ell);
    let routing = restricted_routing(inst, &sf, &grouped, &big, &open_of, &gamma)?;
    checks.push(BoundCheck::at_most("routing_witness_missing", int(routing.is_none() as i64), int(0)));
    let mut reroute_cost = rational::zero();
    let mut constructive = None;
    let mut constructive_stats = None;
    if let Some(routing) = &routing {
        let owner: std::collections::BTreeMap<usize, usize> =
            (0..nodes).flat_map(|p| sf.stars[p].facilities.iter().map(move |&i| (i, p))).collect();
        let mut far = 0usize;
        let mut split: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nodes];
        for (s, i, x) in routing {
            let t = owner[i];
            let (gs, gt) = (grouped.group_of[*s], grouped.group_of[t]);
            if gs != gt && grouped.parent_group[gs] != Some(gt) {
                far += 1;
            }
            if t != *s {
                reroute_cost += x * inst.dq_cc(sf.stars[*s].center, sf.stars[t].center);
            }
            split[*s].push((*i, x / &sf.stars[*s].demand));
        }
        checks.push(BoundCheck::at_most("routing_outside_group_or_parent", int(far as i64), int(0)));
        let sol = assign_through_stars(inst, prep, open.clone(), &split)?;
        let stats = eval_solution(inst, &sol)?;
        checks.push(BoundCheck::at_most("constructive_violation", stats.max_violation.clone(), gamma.clone()));
        constructive = Some(sol);
        constructive_stats = Some(stats);
    }

    let flow = min_cost_assignment(inst, &open, &gamma)?
        .ok_or_else(|| Error::Invariant(format!("opened capacity below the demand at violation {}", rational::format(&gamma))))?;
    let solution = IntegralSolution { open, assign: flow.assign };
    let final_stats = eval_solution(inst, &solution)?;
    checks.push(BoundCheck::at_most("final_violation", final_stats.max_violation.clone(), gamma.clone()));
    if let Some(c) = &constructive_stats {
        checks.push(BoundCheck::at_most("final_vs_constructive", final_stats.total_cost(), c.total_cost()));
    }
    checks.push(BoundCheck::at_most("final_cost", final_stats.total_cost(), group_cost_factor(ell) * &lp));

    let report = UniformReport {
        algorithm: "group",
        ell,
        seed,
        lp_value: lp,
        gamma,
        cost_factor: total_factor(ell, &int(16 * ell as i64 + 5)),
        stars: nodes,
        big_stars: big.iter().filter(|&&b| b).count(),
        trees: f.roots().len(),
        rerouting_nodes: tree_check.rerouting_nodes,
        rerouting_edge_failures: tree_check.count("iv"),
        rerouting_hop_failures: tree_check.count("hop"),
        star_budget_failures: tree_check.count("budget"),
        units: grouped.groups.len(),
        rounded_entries: entries.len(),
        budget_total: total_budget(&prep.stars),
        budget_c: sf.budget_c(),
        transport_cost: prep.transport.total_cost.clone(),
        reroute_cost,
        constructive: constructive_stats,
        final_stats,
        checks,
    };
    let trace = GroupTrace {
        star_forest: sf,
        tree_check,
        grouped,
        after_groups: rounded.after_schedule,
        routing,
        constructive,
    };
    Ok(UniformRun { solution, report, trace })
}
