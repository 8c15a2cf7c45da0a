use crate::instance::{eval_solution, Instance, IntegralSolution, SolutionStats};
use crate::rational::{self, Rational};
use std::fmt;

/// One failed check, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub check: &'static str,
    pub entity: String,
    pub detail: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.check, self.entity, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub stats: Option<SolutionStats>,
    pub findings: Vec<Finding>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        let mut v: Vec<_> = self.findings.iter().map(|f| f.check).collect();
        v.dedup();
        v
    }
}

/// Checks open count, per-facility load against `γ·u_i`, unit demand per
/// client, and total cost against `cost_bound`. All comparisons are exact.
pub fn verify_solution(
    inst: &Instance,
    sol: &IntegralSolution,
    k: usize,
    gamma_bound: &Rational,
    cost_bound: Option<&Rational>,
) -> VerifyReport {
    let mut findings = Vec::new();
    let mut push = |check, entity: String, detail: String| findings.push(Finding { check, entity, detail });
    let (n, m) = (inst.n_clients(), inst.n_facilities());

    if sol.open.len() > k {
        push("open_count", "solution".into(), format!("{} open > k = {k}", sol.open.len()));
    }
    if sol.assign.len() != n {
        push("dimension", "solution".into(), format!("{} assignment rows for {n} clients", sol.assign.len()));
        return VerifyReport { stats: None, findings };
    }
    let mut is_open = vec![false; m];
    for &i in &sol.open {
        if i >= m {
            push("dimension", format!("facility #{i}"), "index out of range".into());
        } else {
            is_open[i] = true;
        }
    }
    for (j, row) in sol.assign.iter().enumerate() {
        let client = format!("client {}", inst.client_ids[j]);
        for (i, a) in row {
            if *i >= m || !is_open[*i] {
                push("closed_facility", client.clone(), format!("assigned to facility #{i}, which is not open"));
            }
            if *a < rational::zero() {
                push("negative", client.clone(), format!("negative amount {}", rational::format(a)));
            }
        }
        let total = rational::sum(row.iter().map(|(_, a)| a));
        if total != rational::one() {
            push("conservation", client, format!("assigned {} instead of 1", rational::format(&total)));
        }
    }
    let load = sol.load(m);
    for &i in sol.open.iter().filter(|&&i| i < m) {
        let cap = gamma_bound * inst.capacity_q(i);
        if load[i] > cap {
            push(
                "capacity",
                format!("facility {}", inst.facility_ids[i]),
                format!("load {} > {} = γ·u", rational::format(&load[i]), rational::format(&cap)),
            );
        }
    }
    let stats = eval_solution(inst, sol).ok();
    if let (Some(s), Some(bound)) = (&stats, cost_bound) {
        let cost = s.total_cost();
        if cost > *bound {
            push("cost", "solution".into(), format!("cost {} > bound {}", rational::to_f64(&cost), rational::to_f64(bound)));
        }
    }
    VerifyReport { stats, findings }
}
