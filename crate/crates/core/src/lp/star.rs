use super::simplex::{self, LinearProgram, Outcome, Sense};
use crate::bundling::StarInstance;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::FractionalSolution;
use crate::rational::{self, Rational};

/// Opening vector `z` over a star's facilities together with the share `d`
/// of the star's demand each facility takes. Both are aligned with
/// [`StarInstance::facilities`].
#[derive(Debug, Clone, PartialEq)]
pub struct StarOpening {
    pub z: Vec<Rational>,
    pub d: Vec<Rational>,
}

impl StarOpening {
    pub fn volume(&self) -> Rational {
        rational::sum(&self.z)
    }

    pub fn fractional_count(&self) -> usize {
        self.z.iter().filter(|v| rational::is_fractional(v)).count()
    }

    /// Σ_i (f_i + d(i,j)·u_i)·z_i.
    pub fn cost(&self, inst: &Instance, star: &StarInstance) -> Rational {
        star.facilities.iter().zip(&self.z).fold(rational::zero(), |acc, (&i, z)| {
            acc + (&inst.opening_costs[i] + inst.dq(i, star.center) * inst.capacity_q(i)) * z
        })
    }

    /// Σ_i u_i·z_i.
    pub fn capacity(&self, inst: &Instance, star: &StarInstance) -> Rational {
        star.facilities
            .iter()
            .zip(&self.z)
            .fold(rational::zero(), |acc, (&i, z)| acc + inst.capacity_q(i) * z)
    }

    /// Names the first violated star constraint, if any.
    pub fn check(&self, inst: &Instance, star: &StarInstance) -> Option<&'static str> {
        if self.z.iter().any(|z| *z < rational::zero() || *z > rational::one()) {
            return Some("box");
        }
        if self.capacity(inst, star) < star.demand {
            return Some("demand");
        }
        if self.cost(inst, star) > star.budget() {
            return Some("budget");
        }
        None
    }

    /// Whether the demand shares add up to `w` and fit under `z·u`.
    pub fn shares_consistent(&self, inst: &Instance, star: &StarInstance) -> bool {
        rational::sum(&self.d) == star.demand
            && star
                .facilities
                .iter()
                .enumerate()
                .all(|(p, &i)| self.d[p] >= rational::zero() && self.d[p] <= &self.z[p] * inst.capacity_q(i))
    }
}

/// `z_i = X_i / u_i`, `d_i = X_i` where `X_i` is the demand `i` serves.
pub fn star_initial_solution(inst: &Instance, star: &StarInstance) -> StarOpening {
    let z = star
        .facilities
        .iter()
        .zip(&star.served)
        .map(|(&i, x)| x / inst.capacity_q(i))
        .collect();
    StarOpening { z, d: star.served.clone() }
}

/// `y*` restricted to the star's facilities, with greedy demand shares.
pub fn star_from_lp_opening(inst: &Instance, star: &StarInstance, frac: &FractionalSolution) -> StarOpening {
    let z: Vec<Rational> = star.facilities.iter().map(|&i| frac.y[i].clone()).collect();
    let d = nearest_first_shares(inst, star, &z);
    StarOpening { z, d }
}

/// Splits the star demand over open capacity, nearest facility first.
pub fn nearest_first_shares(inst: &Instance, star: &StarInstance, z: &[Rational]) -> Vec<Rational> {
    let mut order: Vec<usize> = (0..star.facilities.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (star.facilities[a], star.facilities[b]);
        inst.d(ia, star.center).total_cmp(&inst.d(ib, star.center)).then(ia.cmp(&ib))
    });
    let mut left = star.demand.clone();
    let mut d = vec![rational::zero(); z.len()];
    for p in order {
        if left == rational::zero() {
            break;
        }
        let room = &z[p] * inst.capacity_q(star.facilities[p]);
        let take = rational::min(&room, &left);
        left -= &take;
        d[p] = take;
    }
    d
}

/// The star LP: minimize Σz subject to capacity ≥ w, cost ≤ b, 0 ≤ z ≤ 1.
pub fn build_star_lp(inst: &Instance, star: &StarInstance) -> LinearProgram {
    let mut lp = LinearProgram::default();
    for &i in &star.facilities {
        lp.add_var(format!("z_{i}"), rational::one());
    }
    let vars = 0..star.facilities.len();
    lp.add_row(
        "demand",
        vars.clone().map(|p| (p, inst.capacity_q(star.facilities[p]))).collect(),
        Sense::Ge,
        star.demand.clone(),
    );
    lp.add_row(
        "budget",
        vars.clone()
            .map(|p| {
                let i = star.facilities[p];
                (p, &inst.opening_costs[i] + inst.dq(i, star.center) * inst.capacity_q(i))
            })
            .collect(),
        Sense::Le,
        star.budget(),
    );
    for p in vars {
        lp.add_row(format!("box_{p}"), vec![(p, rational::one())], Sense::Le, rational::one());
    }
    lp
}

/// Minimum-volume basic solution of the star LP. A basic solution has at
/// most two entries strictly between 0 and 1.
pub fn star_extreme_point(inst: &Instance, star: &StarInstance, init: &StarOpening) -> Result<StarOpening> {
    if let Some(c) = init.check(inst, star) {
        return Err(Error::Contract(format!(
            "star of center {} has an infeasible witness ({c})",
            inst.client_ids[star.center]
        )));
    }
    let lp = build_star_lp(inst, star);
    let z = match simplex::solve::<Rational>(&lp)? {
        Outcome::Optimal(s) => s.x,
        _ => return Err(Error::Solver("star LP lost feasibility".into())),
    };
    if z.iter().filter(|v| rational::is_fractional(v)).count() > 2 {
        return Err(Error::Invariant("basic star solution with more than two fractional entries".into()));
    }
    let d = nearest_first_shares(inst, star, &z);
    Ok(StarOpening { z, d })
}

/// Moves volume onto facilities in increasing order of `d(i,j)·u + f_i`,
/// leaving at most one fractional entry. Requires uniform capacities.
pub fn star_almost_integral(inst: &Instance, star: &StarInstance, init: &StarOpening) -> Result<StarOpening> {
    let caps: Vec<u64> = star.facilities.iter().map(|&i| inst.capacities[i]).collect();
    if caps.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Contract("almost-integral openings need uniform capacities".into()));
    }
    let mut order: Vec<usize> = (0..star.facilities.len()).collect();
    let key = |p: usize| {
        let i = star.facilities[p];
        &inst.opening_costs[i] + inst.dq(i, star.center) * inst.capacity_q(i)
    };
    order.sort_by(|&a, &b| key(a).cmp(&key(b)).then(star.facilities[a].cmp(&star.facilities[b])));
    let mut left = init.volume();
    let mut z = vec![rational::zero(); star.facilities.len()];
    for p in order {
        let take = rational::min(&left, &rational::one());
        left -= &take;
        z[p] = take;
    }
    let d = nearest_first_shares(inst, star, &z);
    Ok(StarOpening { z, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn line_instance(caps: &[u64], costs: &[i64], pos: &[f64]) -> Instance {
        let m = caps.len();
        let mut coords = vec![(0.0, 0.0)];
        coords.extend(pos.iter().map(|&x| (x, 0.0)));
        Instance::from_points(
            vec![0],
            (0..m as u64).collect(),
            caps.to_vec(),
            costs.iter().map(|&c| int(c)).collect(),
            1,
            coords,
        )
        .unwrap()
    }

    fn star(served: Vec<Rational>, budget: Rational) -> StarInstance {
        let m = served.len();
        StarInstance {
            center: 0,
            facilities: (0..m).collect(),
            demand: rational::sum(&served),
            served,
            budget_f: int(0),
            budget_c: budget,
            volume: int(1),
        }
    }

    #[test]
    fn idle_star_opens_nothing() {
        let inst = line_instance(&[2], &[0], &[1.0]);
        let s = star(vec![int(0)], int(0));
        let init = star_initial_solution(&inst, &s);
        assert_eq!(init.z, vec![int(0)]);
        let ext = star_extreme_point(&inst, &s, &init).unwrap();
        assert_eq!(ext.z, vec![int(0)]);
    }

    #[test]
    fn initial_solution_divides_by_capacity() {
        let inst = line_instance(&[2], &[0], &[1.0]);
        let s = star(vec![ratio(4, 5)], int(10));
        let init = star_initial_solution(&inst, &s);
        assert_eq!(init.z, vec![ratio(2, 5)]);
        assert_eq!(init.d, vec![ratio(4, 5)]);
        assert_eq!(init.check(&inst, &s), None);
    }

    /// Solves a square system exactly; `None` when singular.
    fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).find(|&r| a[r][c] != int(0))?;
            a.swap(c, p);
            b.swap(c, p);
            for r in 0..n {
                if r != c && a[r][c] != int(0) {
                    let f = &a[r][c] / &a[c][c];
                    for k in 0..n {
                        let v = &f * &a[c][k];
                        a[r][k] -= v;
                    }
                    let v = &f * &b[c];
                    b[r] -= v;
                }
            }
        }
        Some((0..n).map(|r| &b[r] / &a[r][r]).collect())
    }

    /// Minimum of Σz over the vertices of {a·z ≤ c}, found by making every
    /// choice of n constraints tight.
    fn vertex_min_volume(rows: &[(Vec<Rational>, Rational)], n: usize) -> Rational {
        let mut best: Option<Rational> = None;
        for mask in 0u32..(1 << rows.len()) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let pick: Vec<&(Vec<Rational>, Rational)> =
                (0..rows.len()).filter(|r| mask >> r & 1 == 1).map(|r| &rows[r]).collect();
            let Some(z) = solve_square(pick.iter().map(|r| r.0.clone()).collect(), pick.iter().map(|r| r.1.clone()).collect())
            else {
                continue;
            };
            let feasible = rows.iter().all(|(a, c)| a.iter().zip(&z).fold(int(0), |acc, (x, y)| acc + x * y) <= *c);
            if feasible {
                let vol = rational::sum(&z);
                best = Some(best.map_or(vol.clone(), |b| rational::min(&b, &vol)));
            }
        }
        best.expect("bounded feasible polytope")
    }

    #[test]
    fn three_equal_facilities_match_vertex_enumeration() {
        let inst = line_instance(&[2, 2, 2], &[0, 0, 0], &[1.0, 2.0, 3.0]);
        let s = star(vec![int(1), int(1), int(1)], int(1000));
        let init = star_initial_solution(&inst, &s);
        let ext = star_extreme_point(&inst, &s, &init).unwrap();
        let n = 3;
        let mut rows = vec![(vec![int(-2); n], int(-3))];
        rows.push((s.facilities.iter().map(|&i| inst.dq(i, 0) * int(2)).collect(), s.budget()));
        for p in 0..n {
            let unit = |v: i64| (0..n).map(|q| if q == p { int(v) } else { int(0) }).collect::<Vec<_>>();
            rows.push((unit(1), int(1)));
            rows.push((unit(-1), int(0)));
        }
        assert_eq!(ext.volume(), vertex_min_volume(&rows, n));
        assert_eq!(ext.volume(), ratio(3, 2));
        assert!(ext.fractional_count() <= 2);
        assert_eq!(ext.z.iter().filter(|z| **z > int(0)).count(), 2);
        assert!(ext.shares_consistent(&inst, &s));
    }

    #[test]
    fn almost_integral_fills_cheapest_first() {
        let inst = line_instance(&[2, 2], &[0, 0], &[1.0, 2.0]);
        let s = star(vec![int(1), int(1)], int(100));
        let init = StarOpening { z: vec![ratio(1, 2), ratio(1, 2)], d: vec![int(1), int(1)] };
        let out = star_almost_integral(&inst, &s, &init).unwrap();
        assert_eq!(out.z, vec![int(1), int(0)]);
        assert_eq!(out.d, vec![int(2), int(0)]);
    }

    #[test]
    fn almost_integral_refuses_mixed_capacities() {
        let inst = line_instance(&[2, 3], &[0, 0], &[1.0, 2.0]);
        let s = star(vec![int(1), int(1)], int(100));
        let init = star_initial_solution(&inst, &s);
        assert!(matches!(star_almost_integral(&inst, &s, &init), Err(Error::Contract(_))));
    }
}
