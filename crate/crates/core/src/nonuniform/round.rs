use super::forest::FacilityStar;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingCase {
    /// Even number of lower-level members: consecutive pairs by demand.
    Even,
    /// Odd number of lower-level members including the root.
    OddPartialRoot,
    /// Odd number of leaves under a full root.
    OddFullRoot,
}

/// Facilities kept open inside one facility star, and the whole-demand moves
/// `(from, to)` of the closed ones.
#[derive(Debug, Clone, PartialEq)]
pub struct StarRounding {
    pub case: RoundingCase,
    pub open: Vec<usize>,
    pub moves: Vec<(usize, usize)>,
}

/// Pairs `sorted[first], sorted[first+1]`, … and moves the lighter member of
/// each pair into the heavier one.
fn pair_up(sorted: &[usize], first: usize, open: &mut Vec<usize>, moves: &mut Vec<(usize, usize)>) {
    for pair in sorted[first..].chunks(2) {
        if let [a, b] = *pair {
            open.push(b);
            moves.push((a, b));
        }
    }
}

/// Rounds a facility star whose root may be full or on the lower level;
/// `y` holds the snapped openings and `d` the demands.
pub fn round_facility_star(star: &FacilityStar, y: &[Rational], d: &[Rational]) -> StarRounding {
    let by_demand = |v: &mut Vec<usize>| v.sort_by(|&a, &b| d[a].cmp(&d[b]).then(a.cmp(&b)));
    let root_full = y[star.root] == rational::one();
    let mut open = Vec::new();
    let mut moves = Vec::new();
    let case = if !root_full {
        let mut members: Vec<usize> = star.members().collect();
        by_demand(&mut members);
        if members.len() % 2 == 0 {
            pair_up(&members, 0, &mut open, &mut moves);
            RoundingCase::Even
        } else {
            if members.len() == 1 {
                open.push(members[0]);
            } else {
                pair_up(&members, 1, &mut open, &mut moves);
                moves.push((members[0], members[2]));
            }
            RoundingCase::OddPartialRoot
        }
    } else {
        let t = star.root;
        let mut leaves = star.leaves.clone();
        by_demand(&mut leaves);
        if leaves.len() % 2 == 0 {
            open.push(t);
            pair_up(&leaves, 0, &mut open, &mut moves);
            RoundingCase::Even
        } else {
            pair_up(&leaves, 1, &mut open, &mut moves);
            let first = leaves[0];
            if &d[t] / rational::int(2) >= d[first] {
                open.push(t);
                moves.push((first, t));
            } else {
                open.push(first);
                moves.push((t, first));
            }
            RoundingCase::OddFullRoot
        }
    };
    open.sort_unstable();
    moves.sort_unstable();
    StarRounding { case, open, moves }
}

impl StarRounding {
    /// Where each member's demand ends up.
    pub fn destination(&self, i: usize) -> usize {
        self.moves.iter().find(|&&(a, _)| a == i).map_or(i, |&(_, b)| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn loads(star: &FacilityStar, r: &StarRounding, d: &[Rational]) -> Vec<Rational> {
        let mut load = vec![int(0); d.len()];
        for i in star.members() {
            load[r.destination(i)] += &d[i];
        }
        load
    }

    #[test]
    fn even_pair_opens_heavier() {
        let h = ratio(1, 2);
        let star = FacilityStar { root: 0, leaves: vec![1] };
        let d = vec![int(1), int(3)];
        let r = round_facility_star(&star, &[h.clone(), h], &d);
        assert_eq!(r.case, RoundingCase::Even);
        assert_eq!(r.open, vec![1]);
        assert_eq!(loads(&star, &r, &d)[1], int(4));
        // With ℓ = 2 each demand is at most (1+ε)·u, so the pair loads at most
        // 2(1+ε)·u. Here u = 2 and ε = 1/2.
        let (u, eps) = (int(2), ratio(1, 2));
        assert!(d.iter().all(|v| *v <= (int(1) + &eps) * &u));
        assert!(int(4) <= (int(2) + int(2) * &eps) * &u);
    }

    #[test]
    fn odd_leaves_under_full_root_open_root_when_light_leaf() {
        let h = ratio(1, 2);
        let star = FacilityStar { root: 0, leaves: vec![1] };
        let d = vec![int(10), int(4)];
        let r = round_facility_star(&star, &[int(1), h.clone()], &d);
        assert_eq!(r.case, RoundingCase::OddFullRoot);
        assert_eq!(r.open, vec![0]);
        assert_eq!(loads(&star, &r, &d)[0], int(14));

        let d = vec![int(10), int(6)];
        let r = round_facility_star(&star, &[int(1), h], &d);
        assert_eq!(r.open, vec![1]);
        assert_eq!(r.moves, vec![(0, 1)]);
    }

    #[test]
    fn odd_with_partial_root_routes_lightest_two_into_third() {
        let h = ratio(1, 2);
        let star = FacilityStar { root: 2, leaves: vec![0, 1, 3, 4] };
        let d = vec![int(5), int(1), int(2), int(3), int(4)];
        let r = round_facility_star(&star, &vec![h; 5], &d);
        assert_eq!(r.case, RoundingCase::OddPartialRoot);
        // Sorted by demand: 1, 2, 3, 4, 0.
        assert_eq!(r.open, vec![0, 3]);
        assert_eq!(r.moves, vec![(1, 3), (2, 3), (4, 0)]);
        assert_eq!(loads(&star, &r, &d)[3], int(6));
    }

    #[test]
    fn even_leaves_keep_full_root() {
        let h = ratio(1, 2);
        let star = FacilityStar { root: 0, leaves: vec![1, 2] };
        let r = round_facility_star(&star, &[int(1), h.clone(), h], &[int(2), int(3), int(1)]);
        assert_eq!(r.open, vec![0, 1]);
        assert_eq!(r.moves, vec![(2, 1)]);
    }
}
