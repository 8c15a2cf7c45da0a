use super::Instance;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use serde::Serialize;

/// Opened facilities plus a fractional client-to-facility assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSolution {
    /// Sorted facility indices.
    pub open: Vec<usize>,
    /// `assign[j]` lists `(facility, amount)` for client `j`.
    pub assign: Vec<Vec<(usize, Rational)>>,
}

impl IntegralSolution {
    pub fn load(&self, m: usize) -> Vec<Rational> {
        let mut load = vec![rational::zero(); m];
        for row in &self.assign {
            for (i, a) in row {
                if *i < m {
                    load[*i] += a;
                }
            }
        }
        load
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionStats {
    #[serde(serialize_with = "ser_q")]
    pub connection_cost: Rational,
    #[serde(serialize_with = "ser_q")]
    pub opening_cost: Rational,
    #[serde(serialize_with = "ser_q")]
    pub max_violation: Rational,
    pub open_count: usize,
}

fn ser_q<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(v))
}

impl SolutionStats {
    pub fn total_cost(&self) -> Rational {
        &self.connection_cost + &self.opening_cost
    }
}

/// Connection cost, opening cost and worst load/capacity ratio of `sol`.
pub fn eval_solution(inst: &Instance, sol: &IntegralSolution) -> Result<SolutionStats> {
    let (n, m) = (inst.n_clients(), inst.n_facilities());
    if sol.assign.len() != n {
        return Err(Error::Dimension(format!("assignment has {} rows for {n} clients", sol.assign.len())));
    }
    if let Some(&i) = sol.open.iter().find(|&&i| i >= m) {
        return Err(Error::Dimension(format!("open facility index {i} out of range")));
    }
    let mut is_open = vec![false; m];
    for &i in &sol.open {
        is_open[i] = true;
    }
    let mut connection = rational::zero();
    for (j, row) in sol.assign.iter().enumerate() {
        for (i, a) in row {
            if *i >= m || !is_open[*i] {
                return Err(Error::Dimension(format!("client {j} assigned to facility {i} which is not open")));
            }
            connection += a * inst.dq(*i, j);
        }
    }
    let load = sol.load(m);
    let mut max_violation = rational::zero();
    for &i in &sol.open {
        let v = &load[i] / inst.capacity_q(i);
        if v > max_violation {
            max_violation = v;
        }
    }
    let opening = rational::sum(sol.open.iter().map(|&i| &inst.opening_costs[i]));
    Ok(SolutionStats { connection_cost: connection, opening_cost: opening, max_violation, open_count: sol.open.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::load_instance;
    use crate::rational::{int, ratio};

    #[test]
    fn colocated_singleton() {
        let inst = load_instance("CKFL 1 1 1\nC 0 0 0\nF 0 0 0 1 0\n").unwrap();
        let sol = IntegralSolution { open: vec![0], assign: vec![vec![(0, int(1))]] };
        let s = eval_solution(&inst, &sol).unwrap();
        assert_eq!(s.total_cost(), int(0));
        assert_eq!(s.max_violation, int(1));
    }

    #[test]
    fn two_clients_on_unit_capacity() {
        let inst = load_instance("CKFL 2 1 1\nC 0 0 0\nC 1 3 4\nF 0 0 0 1 2.5\n").unwrap();
        let sol = IntegralSolution { open: vec![0], assign: vec![vec![(0, int(1))], vec![(0, int(1))]] };
        let s = eval_solution(&inst, &sol).unwrap();
        assert_eq!(s.max_violation, int(2));
        assert_eq!(s.connection_cost, int(5));
        assert_eq!(s.opening_cost, ratio(5, 2));
    }

    #[test]
    fn assignment_to_closed_facility_is_rejected() {
        let inst = load_instance("CKFL 1 2 1\nC 0 0 0\nF 0 0 0 1 0\nF 1 1 0 1 0\n").unwrap();
        let sol = IntegralSolution { open: vec![0], assign: vec![vec![(1, int(1))]] };
        assert!(eval_solution(&inst, &sol).is_err());
        let short = IntegralSolution { open: vec![0], assign: vec![] };
        assert!(matches!(eval_solution(&inst, &short), Err(Error::Dimension(_))));
    }
}
