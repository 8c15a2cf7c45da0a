use super::startree::BinaryForest;

/// Sons of `j` that are kept, in left-right order. A lone kept son is a
/// left son.
pub fn kept_sons(forest: &BinaryForest, keep: &[bool], j: usize) -> Vec<usize> {
    forest.sons[j].iter().copied().filter(|&s| keep[s]).collect()
}

/// Roots of the fragments left after deleting the nodes with `keep` false.
pub fn fragment_roots(forest: &BinaryForest, keep: &[bool]) -> Vec<usize> {
    (0..forest.len())
        .filter(|&j| keep[j] && forest.parent[j].map_or(true, |p| !keep[p]))
        .collect()
}

/// Matching on the kept nodes: every visited node `j` is matched with its
/// left son; the visit continues at the right son, and below the left son
/// either the two sons are matched (when both are leaves) or each is visited.
/// Pairs are `(son, node)` or `(left, right)` for two leaf brothers.
pub fn make_matching(forest: &BinaryForest, keep: &[bool]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut stack: Vec<usize> = fragment_roots(forest, keep).into_iter().rev().collect();
    while let Some(j) = stack.pop() {
        let sons = kept_sons(forest, keep, j);
        let Some(&l) = sons.first() else { continue };
        pairs.push((l, j));
        let below = kept_sons(forest, keep, l);
        let leaves = below.len() == 2 && below.iter().all(|&s| kept_sons(forest, keep, s).is_empty());
        // Pushed in reverse so the right son is visited first.
        if leaves {
            pairs.push((below[0], below[1]));
        } else {
            stack.extend(below.iter().rev());
        }
        if let Some(&r) = sons.get(1) {
            stack.push(r);
        }
    }
    pairs
}

/// Whether no node occurs in two pairs.
pub fn is_matching(pairs: &[(usize, usize)], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &(a, b) in pairs {
        if a == b || seen[a] || seen[b] {
            return false;
        }
        seen[a] = true;
        seen[b] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn forest(parent: Vec<Option<usize>>, sons: Vec<Vec<usize>>) -> BinaryForest {
        let n = parent.len();
        BinaryForest { parent, sons, ds: vec![int(1); n] }
    }

    #[test]
    fn two_nodes_one_pair() {
        let f = forest(vec![None, Some(0)], vec![vec![1], vec![]]);
        assert_eq!(make_matching(&f, &[true, true]), vec![(1, 0)]);
    }

    #[test]
    fn left_spine_of_four() {
        // a <- b <- c <- d, each the left son.
        let f = forest(vec![None, Some(0), Some(1), Some(2)], vec![vec![1], vec![2], vec![3], vec![]]);
        let m = make_matching(&f, &[true; 4]);
        assert_eq!(m, vec![(1, 0), (3, 2)]);
    }

    #[test]
    fn two_leaf_sons_of_left_son_are_paired() {
        // 0 <- 1 (left), 1 <- 2, 3 (both leaves).
        let f = forest(vec![None, Some(0), Some(1), Some(1)], vec![vec![1], vec![2, 3], vec![], vec![]]);
        assert_eq!(make_matching(&f, &[true; 4]), vec![(1, 0), (2, 3)]);
    }

    #[test]
    fn removed_node_splits_fragments_and_promotes_right_son() {
        // 0 <- 1 (left), 0's son 1 removed; 1 has sons 2, 3.
        let f = forest(vec![None, Some(0), Some(1), Some(1)], vec![vec![1], vec![2, 3], vec![], vec![]]);
        let keep = [true, false, true, true];
        assert_eq!(fragment_roots(&f, &keep), vec![0, 2, 3]);
        assert!(make_matching(&f, &keep).is_empty());
        // Removing the left son 2 makes 3 the left son of 1.
        let keep = [true, true, false, true];
        assert_eq!(kept_sons(&f, &keep, 1), vec![3]);
        assert_eq!(make_matching(&f, &keep), vec![(1, 0)]);
    }

    #[test]
    fn validity_detects_reuse() {
        assert!(is_matching(&[(0, 1), (2, 3)], 4));
        assert!(!is_matching(&[(0, 1), (1, 2)], 3));
    }
}
