use super::flow::min_cost_assignment;
use crate::error::{Error, Result};
use crate::instance::{Instance, IntegralSolution};
use crate::rational::{self, Rational};

pub const EXACT_GUARD: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptimum {
    pub cost: Rational,
    pub solution: IntegralSolution,
}

/// Cheapest solution over all open sets of at most k facilities, assigning
/// optimally with loads at most `γ·u_i`. `Ok(None)` if no open set fits.
pub fn exact_opt(inst: &Instance, gamma: &Rational) -> Result<Option<ExactOptimum>> {
    let m = inst.n_facilities();
    if m > EXACT_GUARD {
        return Err(Error::OracleGuard(m));
    }
    let mut best: Option<ExactOptimum> = None;
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > inst.k {
            continue;
        }
        let open: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let opening = rational::sum(open.iter().map(|&i| &inst.opening_costs[i]));
        if best.as_ref().is_some_and(|b| opening >= b.cost) {
            continue;
        }
        let Some(a) = min_cost_assignment(inst, &open, gamma)? else {
            continue;
        };
        let cost = opening + &a.cost;
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(ExactOptimum { cost, solution: IntegralSolution { open, assign: a.assign } });
        }
    }
    Ok(best)
}
