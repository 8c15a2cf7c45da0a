//! Dense two-phase tableau simplex over any [`Scalar`].
//!
//! Rows and columns are kept dense but pivots skip zero entries, which keeps
//! exact rational pivots on sparse LPs cheap.

use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_traits::Signed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
    pub name: String,
}

/// `minimize objective·x` subject to `rows`, `x ≥ 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub var_names: Vec<String>,
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn add_var(&mut self, name: impl Into<String>, cost: Rational) -> usize {
        self.var_names.push(name.into());
        self.objective.push(cost);
        self.var_names.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.rows.push(Row { coeffs, sense, rhs, name: name.into() });
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }
}

#[derive(Debug, Clone)]
pub struct Solved<S> {
    pub x: Vec<S>,
    pub value: S,
    /// Basic columns of the standard form (structural, then slack/surplus).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub enum Outcome<S> {
    Optimal(Solved<S>),
    Infeasible,
    Unbounded,
}

/// Pivots that do not improve the objective before pricing switches from
/// most-negative reduced cost to Bland's rule for the rest of the solve.
const DEGENERATE_STREAK: usize = 64;
const MAX_PIVOTS: usize = 200_000;
const PERTURBATION: f64 = 1e-7;

fn perturbation<S: Scalar>(r: usize) -> S {
    let jitter = 1.0 + ((r * 7919) % 1000) as f64 / 1000.0;
    S::from_rational(&rational::from_f64(PERTURBATION * jitter))
}

/// Standard-form layout shared by every scalar type, so bases transfer.
struct Layout {
    n: usize,
    /// Rows after sign normalization (nonnegative right-hand sides).
    rows: Vec<Row>,
    slack: Vec<Option<usize>>,
    artificial: Vec<Option<usize>>,
    n_cols: usize,
}

impl Layout {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.n_vars();
        let rows: Vec<Row> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs.is_negative() {
                    let sense = match r.sense {
                        Sense::Le => Sense::Ge,
                        Sense::Ge => Sense::Le,
                        Sense::Eq => Sense::Eq,
                    };
                    Row {
                        coeffs: r.coeffs.iter().map(|(c, v)| (*c, -v)).collect(),
                        sense,
                        rhs: -&r.rhs,
                        name: r.name.clone(),
                    }
                } else {
                    r.clone()
                }
            })
            .collect();
        let mut next = n;
        let slack = rows
            .iter()
            .map(|r| {
                (r.sense != Sense::Eq).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let artificial = rows
            .iter()
            .map(|r| {
                (r.sense != Sense::Le).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Self { n, rows, slack, artificial, n_cols: next }
    }

    fn is_artificial(&self, c: usize) -> bool {
        c >= self.n_cols - self.artificial.iter().flatten().count()
    }
}

struct Tableau<S> {
    a: Vec<Vec<S>>,
    b: Vec<S>,
    basis: Vec<usize>,
    cost: Vec<S>,
    enterable: Vec<bool>,
    bland: bool,
    streak: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn initial(layout: &Layout) -> Self {
        let m = layout.rows.len();
        let mut a = vec![vec![S::zero(); layout.n_cols]; m];
        let mut b = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (r, row) in layout.rows.iter().enumerate() {
            for (c, v) in &row.coeffs {
                a[r][*c] = a[r][*c].clone() + S::from_rational(v);
            }
            if let Some(s) = layout.slack[r] {
                a[r][s] = if row.sense == Sense::Le { S::one() } else { -S::one() };
            }
            if let Some(t) = layout.artificial[r] {
                a[r][t] = S::one();
            }
            let mut rhs = S::from_rational(&row.rhs);
            if !S::EXACT && row.sense == Sense::Le {
                // Distinct tiny relaxations break the degeneracy that makes
                // floating-point pivoting stall; exact solves never see them.
                rhs = rhs + &perturbation::<S>(r);
            }
            b.push(rhs);
            basis.push(layout.artificial[r].or(layout.slack[r]).expect("every row has a starting basic column"));
        }
        Self {
            a,
            b,
            basis,
            cost: vec![S::zero(); layout.n_cols],
            enterable: vec![true; layout.n_cols],
            bland: false,
            streak: 0,
            pivots: 0,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        let nz: Vec<usize> = (0..self.a[r].len()).filter(|&k| !self.a[r][k].is_zero()).collect();
        for &k in &nz {
            self.a[r][k] = (self.a[r][k].clone() / p.clone()).clean();
        }
        self.a[r][c] = S::one();
        self.b[r] = (self.b[r].clone() / p).clean();
        let prow: Vec<(usize, S)> = nz.iter().map(|&k| (k, self.a[r][k].clone())).collect();
        let pb = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (k, v) in &prow {
                self.a[i][*k] = (self.a[i][*k].clone() - f.clone() * v).clean();
            }
            self.a[i][c] = S::zero();
            self.b[i] = (self.b[i].clone() - f * &pb).clean();
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (k, v) in &prow {
                self.cost[*k] = (self.cost[*k].clone() - f.clone() * v).clean();
            }
            self.cost[c] = S::zero();
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn remove_row(&mut self, r: usize) {
        self.a.remove(r);
        self.b.remove(r);
        self.basis.remove(r);
    }

    fn entering(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for c in 0..self.cost.len() {
            if !self.enterable[c] || !self.cost[c].is_neg() {
                continue;
            }
            if self.bland {
                return Some(c);
            }
            if best.is_none_or(|b| self.cost[c] < self.cost[b]) {
                best = Some(c);
            }
        }
        best
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        if S::EXACT {
            self.leaving_exact(c)
        } else {
            self.leaving_harris(c)
        }
    }

    /// Minimum ratio, ties to the lowest basic column.
    fn leaving_exact(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for r in 0..self.a.len() {
            if !self.a[r][c].is_pos() {
                continue;
            }
            let ratio = self.b[r].clone() / self.a[r][c].clone();
            let better = match &best {
                None => true,
                Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    /// Two-pass ratio test: bound the step with relaxed right-hand sides,
    /// then take the largest pivot among rows within that bound.
    fn leaving_harris(&self, c: usize) -> Option<usize> {
        let tol = S::from_rational(&rational::ratio(1, 1_000_000_000));
        let mut bound: Option<S> = None;
        for r in 0..self.a.len() {
            if !self.a[r][c].is_pos() {
                continue;
            }
            let relaxed = (self.b[r].clone() + &tol) / self.a[r][c].clone();
            if bound.as_ref().is_none_or(|b| relaxed < *b) {
                bound = Some(relaxed);
            }
        }
        let bound = bound?;
        let mut best: Option<usize> = None;
        for r in 0..self.a.len() {
            if !self.a[r][c].is_pos() {
                continue;
            }
            let rhs = if self.b[r].is_neg() { S::zero() } else { self.b[r].clone() };
            if rhs / self.a[r][c].clone() > bound {
                continue;
            }
            let better = match best {
                None => true,
                Some(br) => {
                    self.a[r][c] > self.a[br][c] || (self.a[r][c] == self.a[br][c] && self.basis[r] < self.basis[br])
                }
            };
            if better {
                best = Some(r);
            }
        }
        best
    }

    /// Runs primal simplex on the current cost row. `false` means unbounded.
    fn optimize(&mut self) -> Result<bool> {
        let mut skipped = Vec::new();
        loop {
            let Some(c) = self.entering() else { break };
            let Some(r) = self.leaving(c) else {
                // In floating point a column may only look unbounded because
                // its positive entries sit below the pivot tolerance.
                if !S::EXACT && self.a.iter().any(|row| row[c] > S::zero()) {
                    self.enterable[c] = false;
                    skipped.push(c);
                    continue;
                }
                return Ok(false);
            };
            for c in skipped.drain(..) {
                self.enterable[c] = true;
            }
            if self.b[r].is_zero() {
                self.streak += 1;
                if self.streak > DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                self.streak = 0;
            }
            self.pivot(r, c);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Solver(format!("no convergence after {MAX_PIVOTS} pivots")));
            }
        }
        for c in skipped {
            self.enterable[c] = true;
        }
        Ok(true)
    }

    fn set_phase_two_costs(&mut self, layout: &Layout, lp: &LinearProgram) {
        let col_cost = |c: usize| if c < layout.n { S::from_rational(&lp.objective[c]) } else { S::zero() };
        let mut cost: Vec<S> = (0..layout.n_cols).map(col_cost).collect();
        for r in 0..self.a.len() {
            let cb = col_cost(self.basis[r]);
            if cb.is_zero() {
                continue;
            }
            for k in 0..layout.n_cols {
                if !self.a[r][k].is_zero() {
                    cost[k] = (cost[k].clone() - cb.clone() * &self.a[r][k]).clean();
                }
            }
        }
        self.cost = cost;
        for c in 0..layout.n_cols {
            self.enterable[c] = !layout.is_artificial(c);
        }
    }

    /// Pivots zero-level artificials out of the basis, dropping rows that turn
    /// out to be redundant.
    fn expel_artificials(&mut self, layout: &Layout) {
        let mut r = 0;
        while r < self.a.len() {
            if !layout.is_artificial(self.basis[r]) {
                r += 1;
                continue;
            }
            let mut pick: Option<usize> = None;
            for c in 0..layout.n_cols {
                if layout.is_artificial(c) || self.a[r][c].is_zero() {
                    continue;
                }
                // Largest magnitude for floating point, first for exact.
                let mag = |v: &S| if v.is_neg() { -v.clone() } else { v.clone() };
                if pick.is_none_or(|p| mag(&self.a[r][c]) > mag(&self.a[r][p])) {
                    pick = Some(c);
                }
            }
            match pick {
                Some(c) => {
                    self.pivot(r, c);
                    r += 1;
                }
                None => self.remove_row(r),
            }
        }
    }

    fn extract(&self, layout: &Layout, lp: &LinearProgram) -> Solved<S> {
        let mut b = self.b.clone();
        if !S::EXACT {
            // The slack column of a ≤ row started as a unit vector, so it now
            // holds B⁻¹e_r and the relaxation can be taken back out.
            for (r, row) in layout.rows.iter().enumerate() {
                if let (Sense::Le, Some(s)) = (row.sense, layout.slack[r]) {
                    let delta = perturbation::<S>(r);
                    for (i, bi) in b.iter_mut().enumerate() {
                        if !self.a[i][s].is_zero() {
                            *bi = bi.clone() - &(self.a[i][s].clone() * &delta);
                        }
                    }
                }
            }
        }
        let mut x = vec![S::zero(); layout.n];
        for (r, &c) in self.basis.iter().enumerate() {
            if c < layout.n {
                x[c] = b[r].clone();
            }
        }
        let mut value = S::zero();
        for (c, v) in x.iter().enumerate() {
            if !v.is_zero() {
                value = value + S::from_rational(&lp.objective[c]) * v;
            }
        }
        let mut basis = self.basis.clone();
        basis.sort_unstable();
        Solved { x, value, basis, pivots: self.pivots }
    }
}

/// Two-phase simplex from the slack/artificial basis.
pub fn solve<S: Scalar>(lp: &LinearProgram) -> Result<Outcome<S>> {
    let layout = Layout::new(lp);
    let mut t = Tableau::<S>::initial(&layout);
    for c in 0..layout.n_cols {
        if layout.is_artificial(c) {
            continue;
        }
        let mut v = S::zero();
        for r in 0..t.a.len() {
            if layout.is_artificial(t.basis[r]) && !t.a[r][c].is_zero() {
                v = v - &t.a[r][c];
            }
        }
        t.cost[c] = v;
    }
    t.optimize()?;
    let residual = (0..t.a.len())
        .filter(|&r| layout.is_artificial(t.basis[r]))
        .fold(S::zero(), |acc, r| acc + &t.b[r]);
    if residual.is_pos() {
        return Ok(Outcome::Infeasible);
    }
    t.expel_artificials(&layout);
    t.set_phase_two_costs(&layout, lp);
    if !t.optimize()? {
        return Ok(Outcome::Unbounded);
    }
    Ok(Outcome::Optimal(t.extract(&layout, lp)))
}

/// Exact simplex started from a guessed basis (typically found in floating
/// point). `None` when the guess is singular or primal infeasible.
pub fn solve_exact_from_basis(lp: &LinearProgram, guess: &[usize]) -> Result<Option<Outcome<Rational>>> {
    let layout = Layout::new(lp);
    let mut t = Tableau::<Rational>::initial(&layout);
    let mut target = vec![false; layout.n_cols];
    for &c in guess {
        if c >= layout.n_cols || layout.is_artificial(c) {
            return Ok(None);
        }
        target[c] = true;
    }
    for &c in guess {
        if t.basis.contains(&c) {
            continue;
        }
        let row = (0..t.a.len()).find(|&r| !target[t.basis[r]] && !Scalar::is_zero(&t.a[r][c]));
        match row {
            Some(r) => t.pivot(r, c),
            None => return Ok(None),
        }
    }
    if t.b.iter().any(|v| v.is_negative()) {
        return Ok(None);
    }
    if (0..t.a.len()).any(|r| layout.is_artificial(t.basis[r]) && t.b[r].is_positive()) {
        return Ok(None);
    }
    t.expel_artificials(&layout);
    t.set_phase_two_costs(&layout, lp);
    if !t.optimize()? {
        return Ok(Some(Outcome::Unbounded));
    }
    Ok(Some(Outcome::Optimal(t.extract(&layout, lp))))
}

/// Optimal basic solution in exact arithmetic: a floating-point solve finds
/// the basis, exact pivots install and certify it. Falls back to a fully
/// exact solve if the floating-point basis does not verify.
pub fn solve_exact(lp: &LinearProgram) -> Result<Outcome<Rational>> {
    if let Ok(Outcome::Optimal(approx)) = solve::<f64>(lp) {
        if let Some(out) = solve_exact_from_basis(lp, &approx.basis)? {
            return Ok(out);
        }
    }
    solve::<Rational>(lp)
}

/// Checks `x` against every row exactly; returns the first violated row name.
pub fn first_violated_row(lp: &LinearProgram, x: &[Rational]) -> Option<String> {
    if x.iter().any(|v| v.is_negative()) {
        return Some("nonnegativity".into());
    }
    for row in &lp.rows {
        let lhs = row.coeffs.iter().fold(rational::zero(), |acc, (c, v)| acc + v * &x[*c]);
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs,
            Sense::Ge => lhs >= row.rhs,
            Sense::Eq => lhs == row.rhs,
        };
        if !ok {
            return Some(row.name.clone());
        }
    }
    None
}
