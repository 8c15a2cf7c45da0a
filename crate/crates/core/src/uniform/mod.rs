//! Rounding for uniform capacities with opening costs, on star trees built
//! over the bundle centers.
//!
//! Two algorithms share the trees: [`solve_kfl_match6`] (violation 6,
//! `ℓ = 2`), which pairs small stars with a matching and routes closed stars
//! at most two hops, and [`solve_kfl_group`] (violation `2 + 3/(ℓ−1)`), which
//! rounds inside groups of `ℓ` tree nodes.

mod group;
mod groups;
mod match6;
mod matching;
mod startree;

pub use group::{group_cost_factor, group_gamma, run_group, solve_kfl_group, GroupTrace};
pub use groups::{build_groups, check_groups, GroupedTree};
pub use match6::{
    route_closed, run_match6, solve_kfl_match6, star_loads, tree_hops, Match6Trace, MATCH6_COST_FACTOR, MATCH6_VIOLATION,
};
pub use matching::{fragment_roots, is_matching, kept_sons, make_matching};
pub use startree::{
    binary_trees, build_star_forest, short_trees, verify_star_tree, BinaryForest, ShortForest, StarForest, TreeCheck,
    TreeViolation,
};

use crate::bounds::{ser_q, BoundCheck};
use crate::bundling::Prepared;
use crate::error::{Error, Result};
use crate::instance::{Instance, IntegralSolution, SolutionStats};
use crate::rational::{self, Rational};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformReport {
    pub algorithm: &'static str,
    pub ell: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_q")]
    pub lp_value: Rational,
    #[serde(serialize_with = "ser_q")]
    pub gamma: Rational,
    #[serde(serialize_with = "ser_q")]
    pub cost_factor: Rational,
    pub stars: usize,
    pub big_stars: usize,
    pub trees: usize,
    /// Small single-support non-root nodes covered by the rerouting bound.
    pub rerouting_nodes: usize,
    /// Nodes where the out-edge rerouting bound fails.
    pub rerouting_edge_failures: usize,
    /// Nodes where the multi-hop rerouting bound fails.
    pub rerouting_hop_failures: usize,
    /// Stars whose opening exceeds the star budget.
    pub star_budget_failures: usize,
    /// Matched pairs (`match6`) or groups (`group`).
    pub units: usize,
    pub rounded_entries: usize,
    #[serde(serialize_with = "ser_q")]
    pub budget_total: Rational,
    #[serde(serialize_with = "ser_q")]
    pub budget_c: Rational,
    #[serde(serialize_with = "ser_q")]
    pub transport_cost: Rational,
    /// Star-level cost of moving the demand of closed stars.
    #[serde(serialize_with = "ser_q")]
    pub reroute_cost: Rational,
    pub constructive: Option<SolutionStats>,
    pub final_stats: SolutionStats,
    pub checks: Vec<BoundCheck>,
}

impl UniformReport {
    pub fn passed(&self) -> bool {
        crate::bounds::all_passed(&self.checks)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformRun<T> {
    pub solution: IntegralSolution,
    pub report: UniformReport,
    pub trace: T,
}

/// `2ℓ + 2 + c·(2ℓ + 1)`: LP-relative cost of transport plus `c` times the
/// star budgets.
pub fn total_factor(ell: usize, c: &Rational) -> Rational {
    let l = ell as i64;
    rational::int(2 * l + 2) + c * rational::int(2 * l + 1)
}

/// Client-level assignment: the mass a client ships to star `p` is divided
/// over `split[p]` in the listed proportions.
pub fn assign_through_stars(
    inst: &Instance,
    prep: &Prepared,
    open: Vec<usize>,
    split: &[Vec<(usize, Rational)>],
) -> Result<IntegralSolution> {
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); inst.n_clients()];
    for (j, p, amount) in &prep.transport.flows {
        if split[*p].is_empty() {
            return Err(Error::Invariant(format!(
                "demand of star at client {} has nowhere to go",
                inst.client_ids[prep.stars[*p].center]
            )));
        }
        for (i, share) in &split[*p] {
            *rows[*j].entry(*i).or_insert_with(rational::zero) += amount * share;
        }
    }
    let assign = rows.into_iter().map(|r| r.into_iter().collect()).collect();
    Ok(IntegralSolution { open, assign })
}

/// Errors on every violated tree property except the ones that rely on
/// each star's demand filling its opening (`iv`, `hop`, `budget`); those are
/// only counted in the report.
pub(crate) fn structural_errors(check: &TreeCheck) -> Result<()> {
    match check.violations.iter().find(|v| !matches!(v.property, "iv" | "hop" | "budget")) {
        Some(v) => Err(Error::Invariant(format!("star tree {v}"))),
        None => Ok(()),
    }
}
