use crate::bundling::StarInstance;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::StarOpening;
use crate::rational::{self, Rational};

/// Which rule produced a consolidated star opening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsolidationCase {
    /// Nothing was open.
    Idle,
    /// Every open facility was already integral.
    Integral,
    /// A single fractional facility, lifted to the bundle volume.
    LiftSingle,
    /// Two fractional facilities of total opening below one, merged.
    MergeSmall,
    /// The two smallest openings summed to at least one.
    MergeTwo,
    /// Two small fractional openings merged, then merged with an integral one.
    MergeThree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Consolidated {
    pub opening: StarOpening,
    pub case: ConsolidationCase,
}

impl Consolidated {
    /// Σ d'_i·d(i, center).
    pub fn cost(&self, inst: &Instance, star: &StarInstance) -> Rational {
        star.facilities
            .iter()
            .zip(&self.opening.d)
            .fold(rational::zero(), |acc, (&i, d)| acc + d * inst.dq(i, star.center))
    }
}

/// Chooses which of two fractional facilities absorbs both openings and
/// demands: the nearer one if both stay within `1 + eps` of capacity, else
/// the one that does.
fn merge_target(
    inst: &Instance,
    star: &StarInstance,
    z: &[Rational],
    d: &[Rational],
    a: usize,
    b: usize,
    eps: &Rational,
) -> Result<usize> {
    let opening = &z[a] + &z[b];
    let demand = &d[a] + &d[b];
    let limit = rational::one() + eps;
    let within = |p: usize| demand.clone() <= &limit * &opening * inst.capacity_q(star.facilities[p]);
    match (within(a), within(b)) {
        (true, true) => {
            let (ia, ib) = (star.facilities[a], star.facilities[b]);
            let nearer_a = inst.d(ia, star.center).total_cmp(&inst.d(ib, star.center)).then(ia.cmp(&ib)).is_lt();
            Ok(if nearer_a { a } else { b })
        }
        (true, false) => Ok(a),
        (false, true) => Ok(b),
        (false, false) => Err(Error::Invariant(format!(
            "neither facility of star {} can absorb the merged demand",
            inst.client_ids[star.center]
        ))),
    }
}

/// Of two facilities whose openings sum to at least one, the one with the
/// larger demand (lower index on ties) opens fully and takes both demands.
fn open_heavier(d: &[Rational], a: usize, b: usize, facilities: &[usize]) -> usize {
    match d[a].cmp(&d[b]) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if facilities[a] < facilities[b] {
                a
            } else {
                b
            }
        }
    }
}

/// Turns a star opening with at most two fractional entries into one where
/// either a single facility is open at `min(1, vol(F_j))`, or every open
/// facility is integral.
pub fn consolidate_star(inst: &Instance, star: &StarInstance, opening: &StarOpening, eps: &Rational) -> Result<Consolidated> {
    if *eps <= rational::zero() {
        return Err(Error::Contract("epsilon must be positive".into()));
    }
    if opening.fractional_count() > 2 {
        return Err(Error::Contract("consolidation needs at most two fractional openings".into()));
    }
    let mut z = opening.z.clone();
    let mut d = opening.d.clone();
    let zero = rational::zero();
    let one = rational::one();
    let open: Vec<usize> = (0..z.len()).filter(|&p| z[p] > zero).collect();
    let fractional: Vec<usize> = open.iter().copied().filter(|&p| z[p] < one).collect();

    if open.is_empty() {
        return Ok(Consolidated { opening: StarOpening { z, d }, case: ConsolidationCase::Idle });
    }
    if fractional.is_empty() {
        return Ok(Consolidated { opening: StarOpening { z, d }, case: ConsolidationCase::Integral });
    }
    let lifted = rational::min(&one, &star.volume);
    let close_all_but = |z: &mut Vec<Rational>, d: &mut Vec<Rational>, keep: usize, zk: Rational, dk: Rational| {
        for p in 0..z.len() {
            z[p] = rational::zero();
            d[p] = rational::zero();
        }
        z[keep] = zk;
        d[keep] = dk;
    };

    if opening.volume() < one {
        // Every open facility is fractional here.
        let case = if open.len() == 1 {
            let p = open[0];
            close_all_but(&mut z, &mut d, p, lifted, star.demand.clone());
            ConsolidationCase::LiftSingle
        } else {
            let target = merge_target(inst, star, &z, &d, open[0], open[1], eps)?;
            close_all_but(&mut z, &mut d, target, lifted, star.demand.clone());
            ConsolidationCase::MergeSmall
        };
        return Ok(Consolidated { opening: StarOpening { z, d }, case });
    }

    let mut by_opening = open.clone();
    by_opening.sort_by(|&a, &b| z[a].cmp(&z[b]).then(star.facilities[a].cmp(&star.facilities[b])));
    let (a, b) = (by_opening[0], by_opening[1]);
    if &z[a] + &z[b] >= one {
        let keep = open_heavier(&d, a, b, &star.facilities);
        let other = if keep == a { b } else { a };
        d[keep] = &d[a] + &d[b];
        z[keep] = one;
        z[other] = zero.clone();
        d[other] = zero;
        return Ok(Consolidated { opening: StarOpening { z, d }, case: ConsolidationCase::MergeTwo });
    }

    // Both a and b are fractional with total below one, so some other open
    // facility is integral; take the one with the largest demand.
    let half = eps / rational::int(2);
    let keep = merge_target(inst, star, &z, &d, a, b, &half)?;
    let other = if keep == a { b } else { a };
    z[keep] = &z[a] + &z[b];
    d[keep] = &d[a] + &d[b];
    z[other] = zero.clone();
    d[other] = zero.clone();
    let integral = open
        .iter()
        .copied()
        .filter(|&p| z[p] == one)
        .max_by(|&p, &q| d[p].cmp(&d[q]).then(star.facilities[q].cmp(&star.facilities[p])))
        .ok_or_else(|| Error::Invariant("big star without an integral facility".into()))?;
    let winner = open_heavier(&d, integral, keep, &star.facilities);
    let loser = if winner == integral { keep } else { integral };
    d[winner] = &d[integral] + &d[keep];
    z[winner] = one;
    z[loser] = zero.clone();
    d[loser] = zero;
    Ok(Consolidated { opening: StarOpening { z, d }, case: ConsolidationCase::MergeThree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn line(caps: &[u64], pos: &[f64]) -> Instance {
        let mut coords = vec![(0.0, 0.0)];
        coords.extend(pos.iter().map(|&x| (x, 0.0)));
        let m = caps.len();
        Instance::from_points(vec![0], (0..m as u64).collect(), caps.to_vec(), vec![int(0); m], 1, coords).unwrap()
    }

    fn star(m: usize, demand: Rational, volume: Rational) -> StarInstance {
        StarInstance {
            center: 0,
            facilities: (0..m).collect(),
            served: vec![int(0); m],
            demand,
            budget_f: int(0),
            budget_c: int(100),
            volume,
        }
    }

    #[test]
    fn integral_big_opening_is_kept() {
        let inst = line(&[2, 2], &[1.0, 2.0]);
        let s = star(2, int(3), int(2));
        let op = StarOpening { z: vec![int(1), int(1)], d: vec![int(2), int(1)] };
        let c = consolidate_star(&inst, &s, &op, &ratio(1, 2)).unwrap();
        assert_eq!(c.opening, op);
        assert_eq!(c.case, ConsolidationCase::Integral);
    }

    #[test]
    fn small_pair_merges_onto_large_capacity() {
        // z = (0.4, 0.4), u = (10, 1), d = (4, 0.4). Onto facility 0 the load is
        // 4.4 against 0.8·10 = 8; onto facility 1 it is 4.4 against 0.8.
        let inst = line(&[10, 1], &[2.0, 1.0]);
        let s = star(2, ratio(22, 5), ratio(4, 5));
        let op = StarOpening { z: vec![ratio(2, 5), ratio(2, 5)], d: vec![int(4), ratio(2, 5)] };
        let c = consolidate_star(&inst, &s, &op, &ratio(1, 2)).unwrap();
        assert_eq!(c.case, ConsolidationCase::MergeSmall);
        assert_eq!(c.opening.z, vec![ratio(4, 5), int(0)]);
        assert_eq!(c.opening.d, vec![ratio(22, 5), int(0)]);
        assert!(c.opening.d[0] <= &c.opening.z[0] * int(10));
    }

    #[test]
    fn single_fractional_is_lifted_to_bundle_volume() {
        let inst = line(&[4, 4], &[1.0, 2.0]);
        let s = star(2, int(1), ratio(3, 4));
        let op = StarOpening { z: vec![ratio(1, 4), int(0)], d: vec![int(1), int(0)] };
        let c = consolidate_star(&inst, &s, &op, &ratio(1, 2)).unwrap();
        assert_eq!(c.case, ConsolidationCase::LiftSingle);
        assert_eq!(c.opening.z, vec![ratio(3, 4), int(0)]);
    }

    #[test]
    fn two_smallest_summing_to_one_open_the_heavier() {
        let inst = line(&[4, 4, 4], &[1.0, 2.0, 3.0]);
        let s = star(3, int(6), int(2));
        let op = StarOpening { z: vec![int(1), ratio(1, 2), ratio(1, 2)], d: vec![int(4), int(1), int(1)] };
        let c = consolidate_star(&inst, &s, &op, &ratio(1, 2)).unwrap();
        assert_eq!(c.case, ConsolidationCase::MergeTwo);
        assert_eq!(c.opening.z, vec![int(1), int(1), int(0)]);
        assert_eq!(c.opening.d, vec![int(4), int(2), int(0)]);
    }

    #[test]
    fn three_way_merge_respects_violation_and_demand_growth() {
        let eps = ratio(1, 2);
        let inst = line(&[4, 4, 4], &[1.0, 2.0, 3.0]);
        let s = star(3, int(5), int(2));
        for (da, db) in [(ratio(1, 5), ratio(1, 10)), (ratio(6, 5), ratio(1, 5)), (ratio(1, 100), ratio(6, 5))] {
            let dint = int(5) - &da - &db;
            let op = StarOpening { z: vec![int(1), ratio(3, 10), ratio(3, 10)], d: vec![dint, da, db] };
            let c = consolidate_star(&inst, &s, &op, &eps).unwrap();
            assert_eq!(c.case, ConsolidationCase::MergeThree);
            assert_eq!(c.opening.fractional_count(), 0);
            let growth = int(2) + int(4) / &eps;
            for p in 0..3 {
                assert!(c.opening.d[p] <= (int(2) + &eps) * int(4) * &c.opening.z[p]);
                assert!(c.opening.d[p] <= &growth * &op.d[p] || c.opening.d[p] == int(0));
            }
        }
    }
}
