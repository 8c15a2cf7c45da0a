//! Rounding for capacitated k-median with non-uniform capacities: capacity
//! violation at most `3 + 3ε`, at most `k` open facilities.
//!
//! Stages: star openings are consolidated, combined into openings on
//! `[1−1/ℓ, 1]`, snapped to the two levels `{1−1/ℓ, 1}`, and the lower level is
//! rounded inside stars cut from the nearest-neighbor forest. The last step
//! reassigns clients by a min-cost flow under the violated capacities.

mod consolidate;
mod forest;
mod levels;
mod round;

pub use consolidate::{consolidate_star, Consolidated, ConsolidationCase};
pub use forest::{build_facility_forest, decompose_to_stars, FacilityForest, FacilityStar};
pub use levels::{build_interval_solution, level_floor, nearest_open, snap_levels, IntervalSolution, Snapped};
pub use round::{round_facility_star, RoundingCase, StarRounding};

use crate::bounds::{ser_q, BoundCheck};
use crate::bundling::{prepare, total_budget, Prepared};
use crate::error::{Error, Result};
use crate::instance::{eval_solution, Instance, IntegralSolution, SolutionStats};
use crate::lp::{solve_ckfl, star_extreme_point, star_initial_solution};
use crate::oracle::min_cost_assignment;
use crate::rational::{self, int, Rational};
use serde::Serialize;
use std::collections::BTreeMap;

/// Intermediate results of one run, kept for inspection and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct NonuniformTrace {
    pub consolidated: Vec<Consolidated>,
    pub interval: IntervalSolution,
    pub snapped: Snapped,
    pub forest: FacilityForest,
    pub stars: Vec<FacilityStar>,
    pub roundings: Vec<StarRounding>,
    /// Clients follow the demand moves of the rounding.
    pub constructive: IntegralSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonuniformReport {
    #[serde(serialize_with = "ser_q")]
    pub eps: Rational,
    pub ell: usize,
    #[serde(serialize_with = "ser_q")]
    pub lp_value: Rational,
    pub consolidation_cases: BTreeMap<String, usize>,
    pub full_before_snap: usize,
    pub partial_before_snap: usize,
    pub promoted: usize,
    pub facility_stars: usize,
    pub rounding_cases: BTreeMap<String, usize>,
    #[serde(serialize_with = "ser_q")]
    pub budget_total: Rational,
    #[serde(serialize_with = "ser_q")]
    pub transport_cost: Rational,
    #[serde(serialize_with = "ser_q")]
    pub consolidation_cost: Rational,
    #[serde(serialize_with = "ser_q")]
    pub interval_cost: Rational,
    /// `Σ d'_i·d(s(i),i)` over the lower level after snapping.
    #[serde(serialize_with = "ser_q")]
    pub star_edge_sum: Rational,
    #[serde(serialize_with = "ser_q")]
    pub reroute_cost: Rational,
    #[serde(serialize_with = "ser_q")]
    pub constructive_cost: Rational,
    #[serde(serialize_with = "ser_q")]
    pub constructive_violation: Rational,
    pub final_stats: SolutionStats,
    /// `(4ℓ+1)·((2+4/ε)(1+2ℓ) + (2+2ℓ))`.
    #[serde(serialize_with = "ser_q")]
    pub cost_factor: Rational,
    /// `96 + 180/ε`, the constant quoted for `ℓ = 2`; recorded, not asserted.
    #[serde(serialize_with = "ser_q")]
    pub quoted_factor: Rational,
    pub checks: Vec<BoundCheck>,
}

impl NonuniformReport {
    pub fn passed(&self) -> bool {
        crate::bounds::all_passed(&self.checks)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonuniformRun {
    pub solution: IntegralSolution,
    pub report: NonuniformReport,
    pub trace: NonuniformTrace,
}

/// `3 + 3ε`.
pub fn violation_bound(eps: &Rational) -> Rational {
    int(3) + int(3) * eps
}

/// `(2+4/ε)(1+2ℓ) + (2+2ℓ)`: the interval solution's cost over the LP value.
pub fn interval_factor(eps: &Rational, ell: usize) -> Rational {
    let l = int(ell as i64);
    (int(2) + int(4) / eps) * (int(1) + int(2) * &l) + int(2) + int(2) * &l
}

pub fn cost_factor(eps: &Rational, ell: usize) -> Rational {
    int(4 * ell as i64 + 1) * interval_factor(eps, ell)
}

pub fn quoted_factor(eps: &Rational) -> Rational {
    int(96) + int(180) / eps
}

/// Solves the LP and runs [`run_nonuniform`].
pub fn solve_ckm_nonuniform(inst: &Instance, eps: &Rational, ell: usize) -> Result<NonuniformRun> {
    let frac = solve_ckfl(inst)?;
    let prepared = prepare(inst, frac, ell)?;
    run_nonuniform(inst, &prepared, eps)
}

fn count<K: std::fmt::Debug>(keys: impl Iterator<Item = K>) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for k in keys {
        *m.entry(format!("{k:?}")).or_insert(0) += 1;
    }
    m
}

pub fn run_nonuniform(inst: &Instance, prep: &Prepared, eps: &Rational) -> Result<NonuniformRun> {
    if !inst.is_k_median() {
        return Err(Error::Contract("the non-uniform pipeline needs zero opening costs".into()));
    }
    if *eps <= rational::zero() {
        return Err(Error::Contract("epsilon must be positive".into()));
    }
    let ell = prep.ell();
    let lp = prep.frac.value.clone();
    let l = int(ell as i64);
    let mut checks = Vec::new();

    checks.push(BoundCheck::at_most("budget_total", total_budget(&prep.stars), (int(1) + int(2) * &l) * &lp));
    checks.push(BoundCheck::at_most("transport_cost", prep.transport.total_cost.clone(), (int(2) + int(2) * &l) * &lp));

    let mut consolidated = Vec::with_capacity(prep.stars.len());
    for star in &prep.stars {
        let init = star_initial_solution(inst, star);
        let extreme = star_extreme_point(inst, star, &init)?;
        consolidated.push(consolidate_star(inst, star, &extreme, eps)?);
    }
    let growth = int(2) + int(4) / eps;
    let mut consolidation_cost = rational::zero();
    let mut over_budget = 0usize;
    let mut over_capacity = 0usize;
    for (star, c) in prep.stars.iter().zip(&consolidated) {
        let cost = c.cost(inst, star);
        if cost > &growth * star.budget() {
            over_budget += 1;
        }
        consolidation_cost += cost;
        for (p, &i) in star.facilities.iter().enumerate() {
            let (z, d) = (&c.opening.z[p], &c.opening.d[p]);
            let factor = if *z == rational::one() { int(2) + eps } else { int(1) + eps };
            if *d > factor * z * inst.capacity_q(i) {
                over_capacity += 1;
            }
        }
    }
    checks.push(BoundCheck::at_most("consolidation_stars_over_budget", int(over_budget as i64), int(0)));
    checks.push(BoundCheck::at_most("consolidation_facilities_over_capacity", int(over_capacity as i64), int(0)));

    let interval = build_interval_solution(inst, &prep.frac, &prep.stars, &consolidated, ell)?;
    checks.push(BoundCheck::at_most("interval_volume", interval.volume(), int(inst.k as i64)));
    checks.push(BoundCheck::at_most("interval_cost", interval.cost.clone(), interval_factor(eps, ell) * &lp));

    let snapped = snap_levels(inst, &interval.y, &interval.d, ell)?;
    checks.push(BoundCheck::at_most(
        "snap_weighted_distance",
        snapped.weighted_after.clone(),
        snapped.weighted_before.clone(),
    ));
    checks.push(BoundCheck::at_most("snap_volume", snapped.volume(), int(inst.k as i64)));

    let forest = build_facility_forest(&snapped)?;
    let stars = decompose_to_stars(inst, &forest, &snapped)?;
    let roundings: Vec<StarRounding> =
        stars.iter().map(|s| round_facility_star(s, &snapped.y, &interval.d)).collect();

    let m = inst.n_facilities();
    let mut dest: Vec<usize> = (0..m).collect();
    let mut in_star = vec![false; m];
    let mut opened = vec![false; m];
    let mut over_star_volume = 0usize;
    let mut reroute_cost = rational::zero();
    for (star, r) in stars.iter().zip(&roundings) {
        let vol = rational::sum(star.members().map(|i| &snapped.y[i]));
        if r.open.len() > rational::floor_usize(&vol) {
            over_star_volume += 1;
        }
        for i in star.members() {
            in_star[i] = true;
        }
        for &i in &r.open {
            opened[i] = true;
        }
        for &(a, b) in &r.moves {
            dest[a] = b;
            reroute_cost += &interval.d[a] * inst.dq_ff(a, b);
        }
    }
    for i in 0..m {
        if snapped.is_full(i) && !in_star[i] {
            opened[i] = true;
        }
    }
    checks.push(BoundCheck::at_most("stars_opening_above_volume", int(over_star_volume as i64), int(0)));
    let lower = snapped.partial_after();
    let star_edge_sum =
        lower.iter().fold(rational::zero(), |acc, &i| acc + &interval.d[i] * snapped.edge(inst, i));
    checks.push(BoundCheck::at_most("reroute_cost", reroute_cost.clone(), int(2) * &star_edge_sum));
    checks.push(BoundCheck::at_most("star_edges_vs_interval_cost", star_edge_sum.clone(), int(2) * &l * &interval.cost));
    checks.push(BoundCheck::at_most(
        "star_edges_vs_lp",
        star_edge_sum.clone(),
        int(2) * &l * interval_factor(eps, ell) * &lp,
    ));

    let open: Vec<usize> = (0..m).filter(|&i| opened[i]).collect();
    checks.push(BoundCheck::at_most("open_count", int(open.len() as i64), int(inst.k as i64)));
    let n = inst.n_clients();
    let mut assign = Vec::with_capacity(n);
    for j in 0..n {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for i in 0..m {
            let a = &interval.x[i][j];
            if *a != rational::zero() {
                let q = dest[i];
                if !opened[q] {
                    return Err(Error::Invariant(format!(
                        "demand of facility {} routed to closed facility {}",
                        inst.facility_ids[i], inst.facility_ids[q]
                    )));
                }
                *row.entry(q).or_insert_with(rational::zero) += a;
            }
        }
        assign.push(row.into_iter().collect());
    }
    let constructive = IntegralSolution { open: open.clone(), assign };
    let constructive_stats = eval_solution(inst, &constructive)?;
    let gamma = violation_bound(eps);
    checks.push(BoundCheck::at_most("constructive_violation", constructive_stats.max_violation.clone(), gamma.clone()));
    checks.push(BoundCheck::at_most(
        "constructive_cost",
        constructive_stats.connection_cost.clone(),
        &interval.cost + &reroute_cost,
    ));

    let flow = min_cost_assignment(inst, &open, &gamma)?
        .ok_or_else(|| Error::Invariant("no assignment within 3+3eps despite a constructive witness".into()))?;
    let solution = IntegralSolution { open, assign: flow.assign };
    let final_stats = eval_solution(inst, &solution)?;
    checks.push(BoundCheck::at_most("final_violation", final_stats.max_violation.clone(), gamma));
    checks.push(BoundCheck::at_most(
        "final_vs_constructive",
        final_stats.total_cost(),
        constructive_stats.total_cost(),
    ));
    checks.push(BoundCheck::at_most("final_cost", final_stats.total_cost(), cost_factor(eps, ell) * &lp));

    let report = NonuniformReport {
        eps: eps.clone(),
        ell,
        lp_value: lp,
        consolidation_cases: count(consolidated.iter().map(|c| c.case)),
        full_before_snap: snapped.full.len(),
        partial_before_snap: snapped.partial.len(),
        promoted: snapped.promoted,
        facility_stars: stars.len(),
        rounding_cases: count(roundings.iter().map(|r| r.case)),
        budget_total: total_budget(&prep.stars),
        transport_cost: prep.transport.total_cost.clone(),
        consolidation_cost,
        interval_cost: interval.cost.clone(),
        star_edge_sum,
        reroute_cost,
        constructive_cost: constructive_stats.connection_cost.clone(),
        constructive_violation: constructive_stats.max_violation.clone(),
        final_stats,
        cost_factor: cost_factor(eps, ell),
        quoted_factor: quoted_factor(eps),
        checks,
    };
    let trace = NonuniformTrace { consolidated, interval, snapped, forest, stars, roundings, constructive };
    Ok(NonuniformRun { solution, report, trace })
}
