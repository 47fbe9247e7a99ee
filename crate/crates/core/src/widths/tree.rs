//! Leaf-labelled subcubic trees.
//!
//! Internally a tree on `n` leaves is stored as the set of its edge "child masks":
//! rooting the tree at leaf 0, each edge is identified by the set of leaves on the
//! side away from leaf 0. The family is laminar, has `2n - 3` members (one per edge),
//! and determines the tree. Sorting it gives a canonical form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unrooted tree whose leaves are the parties and whose internal vertices have degree 3.
///
/// Nodes `0..n` are the leaves (node `i` is party `leaves[i]`); internal nodes follow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeRepr", into = "TreeRepr")]
pub struct SubcubicTree {
    leaves: Vec<u32>,
    nodes: usize,
    edges: Vec<(usize, usize)>,
    masks: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    leaves: Vec<u32>,
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<TreeRepr> for SubcubicTree {
    type Error = Error;

    fn try_from(r: TreeRepr) -> Result<Self> {
        SubcubicTree::from_edges(r.leaves, r.nodes, r.edges)
    }
}

impl From<SubcubicTree> for TreeRepr {
    fn from(t: SubcubicTree) -> Self {
        TreeRepr {
            leaves: t.leaves,
            nodes: t.nodes,
            edges: t.edges,
        }
    }
}

impl SubcubicTree {
    /// Tree from its laminar child-mask family (leaf 0 is the root side).
    pub(crate) fn from_masks(leaves: Vec<u32>, mut masks: Vec<u64>) -> Self {
        let n = leaves.len();
        masks.sort_unstable();
        if n == 1 {
            return Self {
                leaves,
                nodes: 1,
                edges: Vec::new(),
                masks,
            };
        }
        let full = full_mask(n) & !1;
        // node of a mask: leaf index for singletons, a fresh internal node otherwise
        let mut node_of = Vec::with_capacity(masks.len());
        let mut next = n;
        for &m in &masks {
            if m.count_ones() == 1 {
                node_of.push(m.trailing_zeros() as usize);
            } else {
                node_of.push(next);
                next += 1;
            }
        }
        let mut edges = Vec::with_capacity(masks.len());
        for (i, &m) in masks.iter().enumerate() {
            let parent = if m == full {
                0
            } else {
                // smallest strict superset; masks are sorted so scan by popcount
                let (j, _) = masks
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| p != m && p & m == m)
                    .min_by_key(|&(_, &p)| p.count_ones())
                    .expect("laminar family has a parent for every non-root mask");
                node_of[j]
            };
            let (a, b) = (parent.min(node_of[i]), parent.max(node_of[i]));
            edges.push((a, b));
        }
        Self {
            leaves,
            nodes: next,
            edges,
            masks,
        }
    }

    /// Validates an explicit tree. Leaves are nodes `0..leaves.len()`.
    pub fn from_edges(leaves: Vec<u32>, nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = leaves.len();
        let bad = |msg: String| Err(Error::StructureCheck(format!("not a subcubic tree: {msg}")));
        if n == 0 || n > 64 {
            return bad(format!("{n} leaves (supported: 1..=64)"));
        }
        let mut sorted = leaves.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate leaf label".into());
        }
        if edges.len() + 1 != nodes {
            return bad(format!("{} edges for {nodes} nodes", edges.len()));
        }
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in &edges {
            if a >= nodes || b >= nodes || a == b {
                return bad(format!("edge ({a}, {b})"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for (v, nb) in adj.iter().enumerate() {
            let want_leaf = v < n;
            let ok = if n == 1 {
                nb.is_empty()
            } else if want_leaf {
                nb.len() == 1
            } else {
                nb.len() == 3
            };
            if !ok {
                return bad(format!("node {v} has degree {}", nb.len()));
            }
        }
        if n == 1 {
            return Ok(Self::from_masks(leaves, Vec::new()));
        }
        // leaf masks below every node, rooted at leaf 0
        let mut order = vec![0usize];
        let mut parent = vec![usize::MAX; nodes];
        parent[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &w in &adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    order.push(w);
                }
            }
            i += 1;
        }
        if order.len() != nodes {
            return bad("disconnected".into());
        }
        let mut below = vec![0u64; nodes];
        for &v in order.iter().rev() {
            if v != 0 && v < n {
                below[v] |= 1 << v;
            }
            if v != 0 {
                let p = parent[v];
                below[p] |= below[v];
            }
        }
        let masks = order[1..].iter().map(|&v| below[v]).collect();
        Ok(Self::from_masks(leaves, masks))
    }

    /// Caterpillar: leaves attached along a spine in the given order.
    pub fn caterpillar(leaves: Vec<u32>) -> Self {
        let n = leaves.len();
        // edges away from leaf 0: each suffix of the order, plus singletons
        let mut masks = Vec::new();
        for k in 1..n {
            masks.push(1u64 << k);
            let suffix = full_mask(n) & !((1u64 << k) - 1);
            if k < n - 1 {
                masks.push(suffix);
            }
        }
        Self::from_masks(leaves, masks)
    }

    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// For each edge (same order as [`edges`](Self::edges)), the leaf-index mask of the
    /// side not containing leaf 0.
    pub fn edge_masks(&self) -> &[u64] {
        &self.masks
    }

    /// Canonical form: the sorted child-mask family.
    pub fn canonical(&self) -> Vec<u64> {
        self.masks.clone()
    }

    /// Party labels on the side of edge `e` not containing the first leaf.
    pub fn side_of(&self, e: usize) -> Vec<u32> {
        let m = self.masks[e];
        (0..self.leaves.len())
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| self.leaves[i])
            .collect()
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Number of subcubic trees on `n` labelled leaves: `(2n - 5)!!` for `n >= 3`.
pub fn tree_count(n: usize) -> u128 {
    if n <= 3 {
        return 1;
    }
    (1..=(2 * n as u128 - 5)).step_by(2).product()
}

/// Streams every subcubic tree on the given leaves exactly once.
///
/// Trees are built by inserting leaf `k` into each edge of every tree on leaves
/// `0..k`; distinct insertion sequences give distinct trees.
pub fn enumerate_subcubic_trees(leaves: Vec<u32>) -> impl Iterator<Item = SubcubicTree> {
    MaskTrees::new(leaves.len()).map(move |m| SubcubicTree::from_masks(leaves.clone(), m))
}

/// Depth-first generator of child-mask families.
pub(crate) struct MaskTrees {
    n: usize,
    // (family on leaves 0..k, next edge index to insert leaf k into)
    stack: Vec<(Vec<u64>, usize)>,
    single: Option<Vec<u64>>,
}

impl MaskTrees {
    pub(crate) fn new(n: usize) -> Self {
        match n {
            0 => Self {
                n,
                stack: Vec::new(),
                single: None,
            },
            1 => Self {
                n,
                stack: Vec::new(),
                single: Some(Vec::new()),
            },
            _ => Self {
                n,
                stack: vec![(vec![0b10], 0)],
                single: None,
            },
        }
    }

    /// All completions of a family on the first `k >= 2` leaves.
    pub(crate) fn from_prefix(n: usize, prefix: Vec<u64>) -> Self {
        Self {
            n,
            stack: vec![(prefix, 0)],
            single: None,
        }
    }
}

impl Iterator for MaskTrees {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if let Some(s) = self.single.take() {
            return Some(s);
        }
        loop {
            let (family, edge) = self.stack.last_mut()?;
            let k = family.len().div_ceil(2) + 1;
            if k == self.n {
                let done = family.clone();
                self.stack.pop();
                return Some(done);
            }
            if *edge == family.len() {
                self.stack.pop();
                continue;
            }
            let m = family[*edge];
            *edge += 1;
            let bit = 1u64 << k;
            let mut grown: Vec<u64> = family
                .iter()
                .map(|&x| if x & m == m { x | bit } else { x })
                .collect();
            grown.push(m);
            grown.push(bit);
            self.stack.push((grown, 0));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_double_factorial() {
        for n in 1..=8 {
            let trees: Vec<Vec<u64>> = MaskTrees::new(n).collect();
            assert_eq!(trees.len() as u128, tree_count(n), "n = {n}");
            let distinct: HashSet<Vec<u64>> = trees
                .into_iter()
                .map(|mut t| {
                    t.sort_unstable();
                    t
                })
                .collect();
            assert_eq!(distinct.len() as u128, tree_count(n));
        }
        assert_eq!(tree_count(4), 3);
        assert_eq!(tree_count(6), 105);
        assert_eq!(tree_count(9), 135_135);
    }

    #[test]
    fn generated_trees_are_subcubic() {
        for n in 1..=7 {
            for t in enumerate_subcubic_trees((10..10 + n as u32).collect()) {
                let rebuilt = SubcubicTree::from_edges(
                    t.leaves().to_vec(),
                    t.node_count(),
                    t.edges().to_vec(),
                )
                .unwrap();
                assert_eq!(rebuilt.canonical(), t.canonical());
                if n >= 2 {
                    assert_eq!(t.edges().len(), 2 * n - 3);
                    assert_eq!(t.node_count(), 2 * n - 2);
                }
            }
        }
    }

    #[test]
    fn six_leaf_trees_match_brute_force_census() {
        // Independent census: the 4 internal nodes form a path or a star. Path: two
        // leaves at each end, one on each middle node, up to reversal: 6!/(2!2!)/2 = 90.
        // Star: three outer nodes each holding a pair of leaves: 15 pairings.
        assert_eq!(720 / 4 / 2 + 15, 105);
        assert_eq!(MaskTrees::new(6).count(), 105);
    }

    #[test]
    fn caterpillar_is_valid() {
        for n in 1..=9 {
            let c = SubcubicTree::caterpillar((0..n as u32).collect());
            SubcubicTree::from_edges(c.leaves().to_vec(), c.node_count(), c.edges().to_vec())
                .unwrap();
        }
    }

    #[test]
    fn json_roundtrip_revalidates() {
        let t = SubcubicTree::caterpillar(vec![3, 1, 4, 5, 9]);
        let json = serde_json::to_string(&t).unwrap();
        let back: SubcubicTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back.canonical(), t.canonical());
        assert!(serde_json::from_str::<SubcubicTree>(
            r#"{"leaves":[0,1],"nodes":3,"edges":[[0,2],[2,1]]}"#
        )
        .is_err());
    }

    #[test]
    fn rejects_malformed_trees() {
        // degree-2 internal node
        assert!(SubcubicTree::from_edges(vec![0, 1], 3, vec![(0, 2), (2, 1)]).is_err());
        // disconnected with cycle
        assert!(SubcubicTree::from_edges(vec![0, 1, 2], 4, vec![(0, 3), (1, 3), (1, 2)]).is_err());
        assert!(SubcubicTree::from_edges(vec![0, 0], 2, vec![(0, 1)]).is_err());
        assert!(SubcubicTree::from_edges(vec![5, 6], 2, vec![(0, 1)]).is_ok());
    }
}
