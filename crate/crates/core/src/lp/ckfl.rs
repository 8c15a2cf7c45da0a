use super::simplex::{self, LinearProgram, Outcome, Sense};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};

/// A solution of the Ck-FL relaxation: `x[i][j]` is the share of client `j`
/// served by facility `i`, `y[i]` the opening of facility `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<Vec<Rational>>,
    pub y: Vec<Rational>,
    pub value: Rational,
}

impl FractionalSolution {
    /// Σ_j x_ij: total demand facility `i` serves.
    pub fn served(&self, i: usize) -> Rational {
        rational::sum(&self.x[i])
    }

    /// Fractional connection cost of client `j`.
    pub fn d_av(&self, inst: &Instance, j: usize) -> Rational {
        (0..self.y.len()).fold(rational::zero(), |acc, i| acc + &self.x[i][j] * inst.dq(i, j))
    }

    pub fn connection_cost(&self, inst: &Instance) -> Rational {
        (0..inst.n_clients()).fold(rational::zero(), |acc, j| acc + self.d_av(inst, j))
    }

    pub fn opening_cost(&self, inst: &Instance) -> Rational {
        self.y.iter().zip(&inst.opening_costs).fold(rational::zero(), |acc, (y, f)| acc + y * f)
    }

    pub fn volume(&self) -> Rational {
        rational::sum(&self.y)
    }

    /// `(1−t)·self + t·other`, valued on `inst`. The constraints do not
    /// involve costs or distances, so any two solutions for instances with the
    /// same sizes, capacities and `k` can be blended.
    pub fn blend(&self, other: &Self, t: &Rational, inst: &Instance) -> Self {
        let s = rational::one() - t;
        let mix = |a: &Rational, b: &Rational| &s * a + t * b;
        let y: Vec<Rational> = self.y.iter().zip(&other.y).map(|(a, b)| mix(a, b)).collect();
        let x = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| mix(a, b)).collect())
            .collect();
        let mut out = Self { x, y, value: rational::zero() };
        out.value = out.connection_cost(inst) + out.opening_cost(inst);
        out
    }
}

pub fn y_var(_inst: &Instance, i: usize) -> usize {
    i
}

pub fn x_var(inst: &Instance, i: usize, j: usize) -> usize {
    inst.n_facilities() + i * inst.n_clients() + j
}

/// The Ck-FL relaxation, with the box constraint `y_i ≤ 1`.
pub fn build_ckfl_lp(inst: &Instance) -> LinearProgram {
    let (n, m) = (inst.n_clients(), inst.n_facilities());
    let one = rational::one;
    let mut lp = LinearProgram::default();
    for i in 0..m {
        lp.add_var(format!("y_{i}"), inst.opening_costs[i].clone());
    }
    for i in 0..m {
        for j in 0..n {
            lp.add_var(format!("x_{i}_{j}"), inst.dq(i, j).clone());
        }
    }
    for j in 0..n {
        let coeffs = (0..m).map(|i| (x_var(inst, i, j), one())).collect();
        lp.add_row(format!("assign_{j}"), coeffs, Sense::Eq, one());
    }
    for i in 0..m {
        for j in 0..n {
            lp.add_row(
                format!("link_{i}_{j}"),
                vec![(x_var(inst, i, j), one()), (y_var(inst, i), -one())],
                Sense::Le,
                rational::zero(),
            );
        }
    }
    for i in 0..m {
        let mut coeffs: Vec<_> = (0..n).map(|j| (x_var(inst, i, j), one())).collect();
        coeffs.push((y_var(inst, i), -inst.capacity_q(i)));
        lp.add_row(format!("cap_{i}"), coeffs, Sense::Le, rational::zero());
    }
    lp.add_row("card", (0..m).map(|i| (y_var(inst, i), one())).collect(), Sense::Le, rational::int(inst.k as i64));
    for i in 0..m {
        lp.add_row(format!("open_{i}"), vec![(y_var(inst, i), one())], Sense::Le, one());
    }
    lp
}

/// Optimal basic solution of the Ck-FL relaxation, exact.
pub fn solve_ckfl(inst: &Instance) -> Result<FractionalSolution> {
    let capacity = inst.top_k_capacity();
    if capacity < inst.n_clients() as u64 {
        return Err(Error::Infeasible { k: inst.k, capacity, demand: inst.n_clients() });
    }
    let lp = build_ckfl_lp(inst);
    let sol = match simplex::solve_exact(&lp)? {
        Outcome::Optimal(s) => s,
        Outcome::Infeasible => return Err(Error::Solver("relaxation reported infeasible despite capacity certificate".into())),
        Outcome::Unbounded => return Err(Error::Solver("relaxation reported unbounded".into())),
    };
    if let Some(row) = simplex::first_violated_row(&lp, &sol.x) {
        return Err(Error::Solver(format!("solution violates row {row}")));
    }
    let (n, m) = (inst.n_clients(), inst.n_facilities());
    let y = (0..m).map(|i| sol.x[y_var(inst, i)].clone()).collect();
    let x = (0..m)
        .map(|i| (0..n).map(|j| sol.x[x_var(inst, i, j)].clone()).collect())
        .collect();
    Ok(FractionalSolution { x, y, value: sol.value })
}
