use crate::bundling::{Prepared, StarInstance};
use crate::error::{Error, Result};
use crate::instance::{cmp_pair_key, pair_key, Instance};
use crate::lp::{star_almost_integral, star_from_lp_opening, StarOpening};
use crate::rational::{self, int, Rational};
use std::fmt;

/// Nearest-neighbor in-forest on bundle centers. Nodes are positions in the
/// center list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortForest {
    pub parent: Vec<Option<usize>>,
}

/// Every center points to its nearest other center (pair-key tie-break);
/// in each 2-cycle the edge out of the lower-id center is dropped.
pub fn short_trees(inst: &Instance, centers: &[usize]) -> ShortForest {
    let c = centers.len();
    let key = |a: usize, b: usize| pair_key(inst.d_cc(centers[a], centers[b]), centers[a], centers[b]);
    let mut parent: Vec<Option<usize>> = (0..c)
        .map(|a| (0..c).filter(|&b| b != a).min_by(|&b1, &b2| cmp_pair_key(key(a, b1), key(a, b2))))
        .collect();
    for a in 0..c {
        if let Some(b) = parent[a] {
            if parent[b] == Some(a) && centers[a] < centers[b] {
                parent[a] = None;
            }
        }
    }
    ShortForest { parent }
}

/// In-forest with in-degree at most two, left son first, and doubled edge
/// lengths `d_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForest {
    pub parent: Vec<Option<usize>>,
    /// Sons of each node, left son first. A lone son is a left son.
    pub sons: Vec<Vec<usize>>,
    /// `d_s(j, parent(j))`; zero at roots.
    pub ds: Vec<Rational>,
}

impl BinaryForest {
    /// Builds the son lists from `parent`, ordering each pair by `left_first`.
    pub fn from_parents(parent: Vec<Option<usize>>, ds: Vec<Rational>, left_first: impl Fn(usize, usize) -> bool) -> Self {
        let mut sons = vec![Vec::new(); parent.len()];
        for (j, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                sons[p].push(j);
            }
        }
        for s in &mut sons {
            if s.len() == 2 && !left_first(s[0], s[1]) {
                s.swap(0, 1);
            }
        }
        Self { parent, sons, ds }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.parent[j].is_none()).collect()
    }

    pub fn left(&self, j: usize) -> Option<usize> {
        self.sons[j].first().copied()
    }

    pub fn right(&self, j: usize) -> Option<usize> {
        self.sons[j].get(1).copied()
    }

    /// The left son of `j`'s father when `j` is the right son.
    pub fn left_brother(&self, j: usize) -> Option<usize> {
        let p = self.parent[j]?;
        (self.right(p) == Some(j)).then(|| self.left(p)).flatten()
    }

    pub fn grandparent(&self, j: usize) -> Option<usize> {
        self.parent[j].and_then(|p| self.parent[p])
    }

    pub fn root_of(&self, mut j: usize) -> usize {
        while let Some(p) = self.parent[j] {
            j = p;
        }
        j
    }

    pub fn depth(&self, mut j: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[j] {
            j = p;
            d += 1;
        }
        d
    }

    /// Ancestors of `j` with hop count and `d_s` path length.
    pub fn ancestors(&self, mut j: usize) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        let mut len = rational::zero();
        let mut hops = 0;
        while let Some(p) = self.parent[j] {
            len += &self.ds[j];
            hops += 1;
            out.push((p, hops, len.clone()));
            j = p;
        }
        out
    }

    /// Node sets of the trees, each sorted, ordered by root.
    pub fn trees(&self) -> Vec<Vec<usize>> {
        self.roots()
            .into_iter()
            .map(|r| (0..self.len()).filter(|&j| self.root_of(j) == r).collect())
            .collect()
    }
}

/// Keeps for every node only the edge from its closest son; every other son
/// points to its next closer brother. The new edge of `j` has length
/// `2·d(j, old father)`.
pub fn binary_trees(inst: &Instance, centers: &[usize], short: &ShortForest) -> BinaryForest {
    let c = centers.len();
    let key = |a: usize, b: usize| pair_key(inst.d_cc(centers[a], centers[b]), centers[a], centers[b]);
    let mut parent = vec![None; c];
    let mut ds = vec![rational::zero(); c];
    let mut vertical = vec![false; c];
    for i in 0..c {
        let mut sons: Vec<usize> = (0..c).filter(|&j| short.parent[j] == Some(i)).collect();
        sons.sort_by(|&a, &b| cmp_pair_key(key(a, i), key(b, i)));
        for (rank, &s) in sons.iter().enumerate() {
            parent[s] = Some(if rank == 0 { i } else { sons[rank - 1] });
            ds[s] = int(2) * inst.dq_cc(centers[s], centers[i]);
            vertical[s] = rank == 0;
        }
    }
    // The son coming from below is the left one, the right brother the right one.
    BinaryForest::from_parents(parent, ds, |a, _| vertical[a])
}

/// Star tree forest: binary forest on bundle centers, each node carrying its
/// star instance and an almost-integral opening.
#[derive(Debug, Clone, PartialEq)]
pub struct StarForest {
    pub ell: usize,
    pub u: u64,
    pub forest: BinaryForest,
    pub stars: Vec<StarInstance>,
    pub openings: Vec<StarOpening>,
}

impl StarForest {
    pub fn volume(&self, p: usize) -> Rational {
        self.openings[p].volume()
    }

    pub fn is_big(&self, p: usize) -> bool {
        self.volume(p) >= rational::one()
    }

    /// Positions (within the star) of the fractional entries.
    pub fn fractional(&self, p: usize) -> Vec<usize> {
        (0..self.openings[p].z.len()).filter(|&q| rational::is_fractional(&self.openings[p].z[q])).collect()
    }

    /// Positions of entries that are positive.
    pub fn support(&self, p: usize) -> Vec<usize> {
        (0..self.openings[p].z.len()).filter(|&q| self.openings[p].z[q] > rational::zero()).collect()
    }

    pub fn budget(&self) -> Rational {
        crate::bundling::total_budget(&self.stars)
    }

    pub fn budget_c(&self) -> Rational {
        self.stars.iter().fold(rational::zero(), |acc, s| acc + &s.budget_c)
    }
}

/// Short trees, binary trees, and almost-integral star openings from `y*`.
pub fn build_star_forest(inst: &Instance, prep: &Prepared) -> Result<StarForest> {
    let u = inst
        .uniform_capacity()
        .ok_or_else(|| Error::Contract("star trees need uniform capacities".into()))?;
    let centers = &prep.bundles.centers;
    let short = short_trees(inst, centers);
    let forest = binary_trees(inst, centers, &short);
    let mut openings = Vec::with_capacity(prep.stars.len());
    for star in &prep.stars {
        let init = star_from_lp_opening(inst, star, &prep.frac);
        openings.push(star_almost_integral(inst, star, &init)?);
    }
    Ok(StarForest { ell: prep.ell(), u, forest, stars: prep.stars.clone(), openings })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeViolation {
    /// `i` … `vi`, `metric` for `d ≤ d_s`, `hop` for the h-hop bound, or
    /// `budget` for the budget row of the star LP (reported apart from `i`).
    pub property: &'static str,
    pub node: usize,
    pub detail: String,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "property {} at node {}: {}", self.property, self.node, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeCheck {
    pub violations: Vec<TreeViolation>,
    /// Nodes to which the rerouting bound applies.
    pub rerouting_nodes: usize,
}

impl TreeCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, property: &str) -> usize {
        self.violations.iter().filter(|v| v.property == property).count()
    }
}

/// Evaluates every star-tree property, the doubled-metric relation and the
/// h-hop rerouting bound on each node.
pub fn verify_star_tree(inst: &Instance, sf: &StarForest) -> TreeCheck {
    let f = &sf.forest;
    let mut check = TreeCheck::default();
    let mut push = |property, node, detail: String| check.violations.push(TreeViolation { property, node, detail });
    let floor = rational::one() - rational::ratio(1, sf.ell as i64);
    let u = int(sf.u as i64);
    let centers: Vec<usize> = sf.stars.iter().map(|s| s.center).collect();

    let mut seen = vec![0usize; inst.n_facilities()];
    for (p, (star, z)) in sf.stars.iter().zip(&sf.openings).enumerate() {
        if sf.fractional(p).len() > 1 {
            push("i", p, "opening is not almost integral".into());
        }
        if let Some(what) = z.check(inst, star) {
            let id = if what == "budget" { "budget" } else { "i" };
            push(id, p, format!("opening violates the star {what} constraint"));
        }
        for &i in &star.facilities {
            seen[i] += 1;
        }
        if z.volume() < floor {
            push("iii", p, format!("volume {} below 1-1/l", rational::format(&z.volume())));
        }
    }
    if let Some(i) = seen.iter().position(|&c| c != 1) {
        push("ii", 0, format!("facility index {i} lies in {} stars", seen[i]));
    }
    let mut rerouting_nodes = 0;
    for p in 0..f.len() {
        let indeg = f.sons[p].len();
        if indeg > 2 || (f.parent[p].is_none() && indeg > 1) {
            push("v", p, format!("in-degree {indeg}"));
        }
        let Some(q) = f.parent[p] else { continue };
        if *inst.dq_cc(centers[p], centers[q]) > f.ds[p] {
            push("metric", p, "edge shorter in d_s than in d".into());
        }
        if let Some(_) = f.parent[q] {
            if f.ds[p] < f.ds[q] {
                push("vi", p, "edge lengths increase towards the root".into());
            }
        }
        let support = sf.support(p);
        if support.len() == 1 {
            rerouting_nodes += 1;
            let gap = (rational::one() - &sf.openings[p].z[support[0]]) * &u;
            let bc = &sf.stars[p].budget_c;
            if &gap * &f.ds[p] > int(16) * bc {
                push("iv", p, "rerouting bound fails on the out-edge".into());
            }
            for (_, hops, len) in f.ancestors(p) {
                if &gap * len > int(16 * hops as i64) * bc {
                    push("hop", p, format!("rerouting bound fails at {hops} hops"));
                    break;
                }
            }
        }
    }
    check.rerouting_nodes = rerouting_nodes;
    check
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centers_on_line(xs: &[f64]) -> Instance {
        let n = xs.len();
        let mut coords: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.0)).collect();
        coords.push((0.0, 5.0));
        Instance::from_points((0..n as u64).collect(), vec![0], vec![n as u64], vec![int(0)], 1, coords).unwrap()
    }

    #[test]
    fn collinear_two_cycle_breaks_at_lower_id() {
        let inst = centers_on_line(&[0.0, 1.0, 3.0]);
        let s = short_trees(&inst, &[0, 1, 2]);
        assert_eq!(s.parent, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn two_centers_give_one_edge() {
        let inst = centers_on_line(&[0.0, 1.0]);
        assert_eq!(short_trees(&inst, &[0, 1]).parent, vec![None, Some(0)]);
        assert_eq!(short_trees(&inst, &[1]).parent, vec![None]);
    }

    #[test]
    fn three_sons_chain_from_far_to_near() {
        // Center 0 at the origin, sons at distance 1, 2, 3 on separate rays,
        // each nearer to 0 than to each other.
        let mut coords = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (-3.0, 0.0)];
        coords.push((9.0, 9.0));
        let inst = Instance::from_points((0..4).collect(), vec![0], vec![4], vec![int(0)], 1, coords).unwrap();
        let short = short_trees(&inst, &[0, 1, 2, 3]);
        assert_eq!(short.parent, vec![None, Some(0), Some(0), Some(0)]);
        let b = binary_trees(&inst, &[0, 1, 2, 3], &short);
        assert_eq!(b.parent, vec![None, Some(0), Some(1), Some(2)]);
        assert_eq!(b.ds, vec![int(0), int(2), int(4), int(6)]);
        assert_eq!(b.sons[1], vec![2]);
        assert_eq!(b.left_brother(2), None);
    }

    #[test]
    fn single_son_keeps_topology_with_doubled_length() {
        let inst = centers_on_line(&[0.0, 1.0, 3.0]);
        let centers = [0, 1, 2];
        let b = binary_trees(&inst, &centers, &short_trees(&inst, &centers));
        assert_eq!(b.parent, vec![None, Some(0), Some(1)]);
        assert_eq!(b.ds, vec![int(0), int(2), int(4)]);
    }

    #[test]
    fn vertical_son_is_left_and_brother_right() {
        // Father 0; sons 1 (near) and 2 (far); node 3 hangs below son 1.
        let coords = vec![(0.0, 0.0), (1.0, 0.0), (-2.5, 0.0), (2.3, 0.0), (0.0, 9.0)];
        let inst = Instance::from_points((0..4).collect(), vec![0], vec![4], vec![int(0)], 1, coords).unwrap();
        let centers = [0, 1, 2, 3];
        let short = short_trees(&inst, &centers);
        assert_eq!(short.parent, vec![None, Some(0), Some(0), Some(1)]);
        let b = binary_trees(&inst, &centers, &short);
        assert_eq!(b.parent, vec![None, Some(0), Some(1), Some(1)]);
        assert_eq!(b.sons[1], vec![3, 2]);
        assert_eq!(b.left_brother(2), Some(3));
    }
}
