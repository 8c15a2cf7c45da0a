use super::consolidate::Consolidated;
use crate::bundling::StarInstance;
use crate::error::{Error, Result};
use crate::instance::{cmp_pair_key, pair_key, Instance};
use crate::lp::FractionalSolution;
use crate::rational::{self, Rational};

/// Openings where every positive entry lies in `[1−1/ℓ, 1]`, the demand
/// `d'` each open facility takes over, and the matching client assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSolution {
    pub y: Vec<Rational>,
    pub d: Vec<Rational>,
    /// `x[i][j]`, facility-major like the LP solution.
    pub x: Vec<Vec<Rational>>,
    pub cost: Rational,
}

impl IntervalSolution {
    pub fn volume(&self) -> Rational {
        rational::sum(&self.y)
    }

    pub fn open(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i] > rational::zero()).collect()
    }
}

pub fn level_floor(ell: usize) -> Rational {
    rational::one() - rational::ratio(1, ell as i64)
}

/// Unions the consolidated star openings and splits every client's mass sent
/// to a star over its open facilities in proportion to `d'_i / w_j`.
pub fn build_interval_solution(
    inst: &Instance,
    frac: &FractionalSolution,
    stars: &[StarInstance],
    consolidated: &[Consolidated],
    ell: usize,
) -> Result<IntervalSolution> {
    if stars.len() != consolidated.len() {
        return Err(Error::Dimension(format!("{} stars but {} openings", stars.len(), consolidated.len())));
    }
    let (n, m) = (inst.n_clients(), inst.n_facilities());
    let mut y = vec![rational::zero(); m];
    let mut d = vec![rational::zero(); m];
    let mut x = vec![vec![rational::zero(); n]; m];
    for (star, c) in stars.iter().zip(consolidated) {
        for (p, &i) in star.facilities.iter().enumerate() {
            y[i] = c.opening.z[p].clone();
            d[i] = c.opening.d[p].clone();
        }
        if star.demand == rational::zero() {
            continue;
        }
        if c.opening.volume() == rational::zero() {
            return Err(Error::Invariant(format!(
                "star of center {} has demand but no open facility",
                inst.client_ids[star.center]
            )));
        }
        for jp in 0..n {
            let mass = rational::sum(star.facilities.iter().map(|&i| &frac.x[i][jp]));
            if mass == rational::zero() {
                continue;
            }
            for &i in &star.facilities {
                if d[i] != rational::zero() {
                    x[i][jp] = &d[i] / &star.demand * &mass;
                }
            }
        }
    }
    let floor = level_floor(ell);
    for i in 0..m {
        if y[i] > rational::zero() && (y[i] < floor || y[i] > rational::one()) {
            return Err(Error::Invariant(format!(
                "facility {} opened at {} outside [1-1/l, 1]",
                inst.facility_ids[i],
                rational::format(&y[i])
            )));
        }
        if let Some(j) = (0..n).find(|&j| x[i][j] > y[i]) {
            return Err(Error::Invariant(format!(
                "client {} sends more to facility {} than it opens",
                inst.client_ids[j], inst.facility_ids[i]
            )));
        }
    }
    for j in 0..n {
        let total = rational::sum((0..m).map(|i| &x[i][j]));
        if total != rational::one() {
            return Err(Error::Invariant(format!(
                "client {} assigned {} in the interval solution",
                inst.client_ids[j],
                rational::format(&total)
            )));
        }
    }
    let mut cost = rational::zero();
    for i in 0..m {
        for j in 0..n {
            if x[i][j] != rational::zero() {
                cost += &x[i][j] * inst.dq(i, j);
            }
        }
    }
    Ok(IntervalSolution { y, d, x, cost })
}

/// For every facility in `open`, the nearest other member of `open`, ties
/// broken by the lower index of the pair. Facilities outside `open` map to
/// `None`, as does a lone member.
pub fn nearest_open(inst: &Instance, open: &[usize]) -> Vec<Option<usize>> {
    let mut s = vec![None; inst.n_facilities()];
    for &i in open {
        s[i] = open
            .iter()
            .copied()
            .filter(|&h| h != i)
            .min_by(|&a, &b| cmp_pair_key(pair_key(inst.d_ff(i, a), i, a), pair_key(inst.d_ff(i, b), i, b)));
    }
    s
}

/// Openings restricted to the two levels `1−1/ℓ` and `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapped {
    pub y: Vec<Rational>,
    pub nearest: Vec<Option<usize>>,
    /// Facilities opened at 1 before snapping.
    pub full: Vec<usize>,
    /// Facilities below 1 before snapping, in promotion order.
    pub partial: Vec<usize>,
    pub promoted: usize,
    /// `Σ d'_i·(1−y'_i)·d(s(i),i)` over `partial`.
    pub weighted_before: Rational,
    /// The same sum under the snapped openings.
    pub weighted_after: Rational,
}

impl Snapped {
    pub fn volume(&self) -> Rational {
        rational::sum(&self.y)
    }

    pub fn is_full(&self, i: usize) -> bool {
        self.y[i] == rational::one()
    }

    /// Open facilities at the lower level.
    pub fn partial_after(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i] > rational::zero() && self.y[i] < rational::one()).collect()
    }

    /// `d(s(i), i)` as an exact value, zero for a facility without neighbor.
    pub fn edge(&self, inst: &Instance, i: usize) -> Rational {
        self.nearest[i].map_or_else(rational::zero, |s| inst.dq_ff(i, s).clone())
    }
}

fn weighted(inst: &Instance, set: &[usize], y: &[Rational], d: &[Rational], s: &[Option<usize>]) -> Rational {
    set.iter().fold(rational::zero(), |acc, &i| match s[i] {
        Some(t) => acc + &d[i] * (rational::one() - &y[i]) * inst.dq_ff(i, t),
        None => acc,
    })
}

/// Moves every opening below 1 to `1−1/ℓ` or `1`. The facilities with the
/// largest `d'_i·d(s(i),i)` are promoted to 1, as many as keep the volume at
/// `k`; the count is clamped to `[0, |partial|]`.
pub fn snap_levels(inst: &Instance, y: &[Rational], d: &[Rational], ell: usize) -> Result<Snapped> {
    if ell < 2 {
        return Err(Error::Contract("ell must be at least 2".into()));
    }
    let one = rational::one();
    let floor = level_floor(ell);
    let open: Vec<usize> = (0..y.len()).filter(|&i| y[i] > rational::zero()).collect();
    if rational::sum(y) > rational::int(inst.k as i64) {
        return Err(Error::Contract("opening volume exceeds k".into()));
    }
    let nearest = nearest_open(inst, &open);
    let full: Vec<usize> = open.iter().copied().filter(|&i| y[i] == one).collect();
    let mut partial: Vec<usize> = open.iter().copied().filter(|&i| y[i] < one).collect();
    if let Some(&i) = partial.iter().find(|&&i| y[i] < floor) {
        return Err(Error::Contract(format!("facility {} is below level 1-1/l", inst.facility_ids[i])));
    }
    let key = |i: usize| nearest[i].map_or_else(rational::zero, |t| &d[i] * inst.dq_ff(i, t));
    partial.sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));

    let (k, l) = (inst.k as i64, ell as i64);
    let raw = k * l - full.len() as i64 * l - partial.len() as i64 * (l - 1);
    let promoted = raw.clamp(0, partial.len() as i64) as usize;

    let mut snapped = y.to_vec();
    for (rank, &i) in partial.iter().enumerate() {
        snapped[i] = if rank < promoted { one.clone() } else { floor.clone() };
    }
    let weighted_before = weighted(inst, &partial, y, d, &nearest);
    let weighted_after = weighted(inst, &partial, &snapped, d, &nearest);
    Ok(Snapped { y: snapped, nearest, full, partial, promoted, weighted_before, weighted_after })
}
