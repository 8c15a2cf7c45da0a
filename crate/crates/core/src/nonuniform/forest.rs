use super::levels::Snapped;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// In-forest with an edge `i → s(i)` for every facility on the lower level.
#[derive(Debug, Clone, PartialEq)]
pub struct FacilityForest {
    /// Sorted member facilities.
    pub nodes: Vec<usize>,
    /// Per facility index; `None` for roots and non-members.
    pub parent: Vec<Option<usize>>,
    /// Sorted roots.
    pub roots: Vec<usize>,
    /// Lower-index ends of the 2-cycles that were broken.
    pub broken: Vec<usize>,
}

impl FacilityForest {
    pub fn children(&self, i: usize) -> Vec<usize> {
        self.nodes.iter().copied().filter(|&c| self.parent[c] == Some(i)).collect()
    }

    pub fn root_of(&self, mut i: usize) -> usize {
        while let Some(p) = self.parent[i] {
            i = p;
        }
        i
    }

    pub fn depth(&self, mut i: usize) -> usize {
        let mut depth = 0;
        while let Some(p) = self.parent[i] {
            i = p;
            depth += 1;
        }
        depth
    }
}

pub fn build_facility_forest(snapped: &Snapped) -> Result<FacilityForest> {
    let m = snapped.y.len();
    let lower = snapped.partial_after();
    let mut parent = vec![None; m];
    let mut member = vec![false; m];
    for &i in &lower {
        member[i] = true;
        if let Some(t) = snapped.nearest[i] {
            parent[i] = Some(t);
            member[t] = true;
        }
    }
    let mut broken = Vec::new();
    for &i in &lower {
        if let Some(t) = parent[i] {
            if i < t && parent[t] == Some(i) {
                parent[i] = None;
                broken.push(i);
            }
        }
    }
    let nodes: Vec<usize> = (0..m).filter(|&i| member[i]).collect();
    for &i in &nodes {
        let mut cur = i;
        for _ in 0..=nodes.len() {
            match parent[cur] {
                Some(p) => cur = p,
                None => break,
            }
        }
        if parent[cur].is_some() {
            return Err(Error::Invariant(format!("nearest-neighbor cycle longer than two through facility index {i}")));
        }
    }
    let roots = nodes.iter().copied().filter(|&i| parent[i].is_none()).collect();
    Ok(FacilityForest { nodes, parent, roots, broken })
}

/// A root with the leaves cut together with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacilityStar {
    pub root: usize,
    pub leaves: Vec<usize>,
}

impl FacilityStar {
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.root).chain(self.leaves.iter().copied())
    }
}

/// Cuts every tree into stars: repeatedly the deepest remaining leaf (lower
/// index on ties) and its siblings are removed together with their parent.
/// A lone leftover root on the lower level joins the star rooted at its
/// nearest neighbor.
pub fn decompose_to_stars(inst: &Instance, forest: &FacilityForest, snapped: &Snapped) -> Result<Vec<FacilityStar>> {
    let m = forest.parent.len();
    let mut stars: Vec<FacilityStar> = Vec::new();
    let depth: Vec<usize> = (0..m).map(|i| forest.depth(i)).collect();
    for &root in &forest.roots {
        let mut alive: Vec<usize> = forest.nodes.iter().copied().filter(|&i| forest.root_of(i) == root).collect();
        let first_star = stars.len();
        while alive.len() >= 2 {
            let has_child = |v: usize, alive: &[usize]| alive.iter().any(|&c| forest.parent[c] == Some(v));
            let leaf = alive
                .iter()
                .copied()
                .filter(|&v| v != root && !has_child(v, &alive))
                .max_by(|&a, &b| depth[a].cmp(&depth[b]).then(b.cmp(&a)))
                .ok_or_else(|| Error::Invariant("tree without a leaf".into()))?;
            let top = forest.parent[leaf].expect("non-root");
            let leaves: Vec<usize> = alive.iter().copied().filter(|&c| forest.parent[c] == Some(top)).collect();
            alive.retain(|&v| v != top && !leaves.contains(&v));
            stars.push(FacilityStar { root: top, leaves });
        }
        let Some(&last) = alive.first() else { continue };
        if snapped.is_full(last) {
            continue;
        }
        if stars.len() == first_star {
            // A single facility overall; it forms its own star.
            stars.push(FacilityStar { root: last, leaves: Vec::new() });
            continue;
        }
        let limit = snapped.nearest[last].map_or(f64::INFINITY, |s| inst.d_ff(last, s));
        let target = (first_star..stars.len())
            .filter(|&p| inst.d_ff(last, stars[p].root) <= limit)
            .min_by(|&a, &b| {
                let (ra, rb) = (stars[a].root, stars[b].root);
                inst.d_ff(last, ra).total_cmp(&inst.d_ff(last, rb)).then(ra.cmp(&rb))
            })
            .ok_or_else(|| Error::Invariant(format!("no star to attach facility {}", inst.facility_ids[last])))?;
        stars[target].leaves.push(last);
    }
    for s in &mut stars {
        s.leaves.sort_unstable();
    }
    Ok(stars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonuniform::levels::snap_levels;
    use crate::rational::{int, ratio, Rational};

    fn line(k: usize, pos: &[f64]) -> Instance {
        let m = pos.len();
        let mut coords = vec![(0.0, 0.0)];
        coords.extend(pos.iter().map(|&x| (x, 0.0)));
        Instance::from_points(vec![0], (0..m as u64).collect(), vec![1; m], vec![int(0); m], k, coords).unwrap()
    }

    fn snapped(y: Vec<Rational>, nearest: Vec<Option<usize>>) -> Snapped {
        Snapped {
            y,
            nearest,
            full: vec![],
            partial: vec![],
            promoted: 0,
            weighted_before: int(0),
            weighted_after: int(0),
        }
    }

    #[test]
    fn path_cuts_middle_star_then_handles_root() {
        // a → b → c with c integral.
        let inst = line(3, &[0.0, 3.0, 5.0]);
        let h = ratio(1, 2);
        let s = snapped(vec![h.clone(), h.clone(), int(1)], vec![Some(1), Some(2), Some(1)]);
        let f = build_facility_forest(&s).unwrap();
        assert_eq!(f.roots, vec![2]);
        let stars = decompose_to_stars(&inst, &f, &s).unwrap();
        assert_eq!(stars, vec![FacilityStar { root: 1, leaves: vec![0] }]);

        // Same path with c on the lower level and pointing back at b.
        let s = snapped(vec![h.clone(), h.clone(), h], vec![Some(1), Some(2), Some(1)]);
        let f = build_facility_forest(&s).unwrap();
        assert_eq!(f.broken, vec![1]);
        assert_eq!(f.roots, vec![1]);
        let stars = decompose_to_stars(&inst, &f, &s).unwrap();
        assert_eq!(stars, vec![FacilityStar { root: 1, leaves: vec![0, 2] }]);
    }

    #[test]
    fn mutual_pair_breaks_at_lower_index() {
        let inst = line(1, &[0.0, 1.0]);
        let h = ratio(1, 2);
        let s = snap_levels(&inst, &[h.clone(), h], &[int(1), int(1)], 2).unwrap();
        let f = build_facility_forest(&s).unwrap();
        assert_eq!(f.parent, vec![None, Some(0)]);
        assert_eq!(f.broken, vec![0]);
        let stars = decompose_to_stars(&inst, &f, &s).unwrap();
        assert_eq!(stars, vec![FacilityStar { root: 0, leaves: vec![1] }]);
    }

    #[test]
    fn integral_only_gives_empty_forest() {
        let s = snapped(vec![int(1), int(1)], vec![Some(1), Some(0)]);
        let f = build_facility_forest(&s).unwrap();
        assert!(f.nodes.is_empty());
    }

    #[test]
    fn deepest_leaf_goes_first() {
        // 3 → 2 → 1 → 0 and 4 → 0, facility 0 integral.
        let inst = line(4, &[0.0, 1.0, 2.1, 3.3, -1.5]);
        let h = ratio(1, 2);
        let y = vec![int(1), h.clone(), h.clone(), h.clone(), h];
        let s = snapped(y, vec![Some(1), Some(0), Some(1), Some(2), Some(0)]);
        let f = build_facility_forest(&s).unwrap();
        let stars = decompose_to_stars(&inst, &f, &s).unwrap();
        assert_eq!(
            stars,
            vec![FacilityStar { root: 2, leaves: vec![3] }, FacilityStar { root: 0, leaves: vec![1, 4] }]
        );
        for st in &stars {
            assert!(st.leaves.iter().all(|&l| !s.is_full(l)));
        }
    }
}
