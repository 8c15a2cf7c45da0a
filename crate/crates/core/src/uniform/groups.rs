use super::startree::BinaryForest;
use crate::rational::Rational;

/// Partition of a forest's nodes into groups grown top-down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedTree {
    pub ell: usize,
    /// Members of each group in insertion order; the first is the group root.
    pub groups: Vec<Vec<usize>>,
    pub group_of: Vec<usize>,
    pub parent_group: Vec<Option<usize>>,
}

impl GroupedTree {
    pub fn root(&self, g: usize) -> usize {
        self.groups[g][0]
    }

    pub fn children(&self, g: usize) -> Vec<usize> {
        (0..self.groups.len()).filter(|&h| self.parent_group[h] == Some(g)).collect()
    }

    /// Position of `j` inside its group.
    pub fn rank(&self, j: usize) -> usize {
        self.groups[self.group_of[j]].iter().position(|&x| x == j).expect("member of its group")
    }
}

/// Repeatedly takes the topmost ungrouped node (lowest depth, then lowest
/// index) and grows its group by the cheapest edge from a member to an
/// ungrouped son until it has `ell` nodes or no son is left.
pub fn build_groups(forest: &BinaryForest, ell: usize) -> GroupedTree {
    let n = forest.len();
    let depth: Vec<usize> = (0..n).map(|j| forest.depth(j)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (depth[j], j));
    let mut group_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &top in &order {
        if group_of[top] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut members = vec![top];
        group_of[top] = g;
        while members.len() < ell {
            let next = members
                .iter()
                .flat_map(|&j| forest.sons[j].iter().copied())
                .filter(|&s| group_of[s] == usize::MAX)
                .min_by(|&a, &b| forest.ds[a].cmp(&forest.ds[b]).then(a.cmp(&b)));
            let Some(s) = next else { break };
            group_of[s] = g;
            members.push(s);
        }
        groups.push(members);
    }
    let parent_group = groups.iter().map(|m| forest.parent[m[0]].map(|p| group_of[p])).collect();
    GroupedTree { ell, groups, group_of, parent_group }
}

/// Lists violated grouping invariants: full size for groups with children,
/// at most `ell + 1` child groups, and edge lengths growing from a group
/// through its connecting edge into each child group.
pub fn check_groups(forest: &BinaryForest, g: &GroupedTree) -> Vec<String> {
    let mut bad = Vec::new();
    let inner = |h: usize| -> Vec<&Rational> {
        g.groups[h].iter().skip(1).map(|&j| &forest.ds[j]).collect()
    };
    for h in 0..g.groups.len() {
        let kids = g.children(h);
        if !kids.is_empty() && g.groups[h].len() != g.ell {
            bad.push(format!("group {h} has children but {} members", g.groups[h].len()));
        }
        if kids.len() > g.ell + 1 {
            bad.push(format!("group {h} has {} child groups", kids.len()));
        }
        let top = inner(h).into_iter().max();
        for c in kids {
            let link = &forest.ds[g.root(c)];
            let below = inner(c).into_iter().min();
            if top.is_some_and(|t| t > link) || below.is_some_and(|b| b < link) {
                bad.push(format!("edge lengths not monotone between group {h} and child group {c}"));
            }
        }
    }
    bad
}
