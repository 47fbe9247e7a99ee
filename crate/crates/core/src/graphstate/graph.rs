use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::Pauli;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Simple undirected graph with stable vertex labels.
///
/// Vertices are addressed by their label in the public API. Positions (the index
/// into the adjacency matrix) shift when vertices are deleted; labels never do.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    labels: Vec<u32>,
    index: HashMap<u32, usize>,
    adj: BitMatrix,
}

/// Label-level edge list, as serialized in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub labels: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Edgeless graph on vertices labelled `0..n`.
    pub fn empty(n: usize) -> Self {
        Self::with_labels((0..n as u32).collect()).expect("sequential labels are unique")
    }

    pub fn with_labels(labels: Vec<u32>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            if index.insert(l, i).is_some() {
                return Err(Error::DuplicateLabel(l));
            }
        }
        let n = labels.len();
        Ok(Self {
            labels,
            index,
            adj: BitMatrix::zeros(n, n),
        })
    }

    /// Graph on `0..n` with the given label pairs as edges.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from a symmetric zero-diagonal adjacency matrix.
    pub fn from_adjacency(labels: Vec<u32>, adj: BitMatrix) -> Result<Self> {
        let mut g = Self::with_labels(labels)?;
        let n = g.n();
        if adj.rows() != n || adj.cols() != n {
            return Err(Error::Dimension(format!(
                "adjacency is {}x{}, expected {n}x{n}",
                adj.rows(),
                adj.cols()
            )));
        }
        for i in 0..n {
            if adj.get_unchecked(i, i) {
                return Err(Error::Parse(format!("self-loop at position {i}")));
            }
            for j in 0..i {
                if adj.get_unchecked(i, j) != adj.get_unchecked(j, i) {
                    return Err(Error::Parse(format!(
                        "adjacency not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        g.adj = adj;
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.add_edge(n as u32 - 1, 0).expect("valid cycle");
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n as u32 {
            for j in 0..i {
                g.add_edge(i, j).expect("valid clique");
            }
        }
        g
    }

    /// Star with centre 0 and leaves `1..n`; its graph state is a GHZ state up to local unitaries.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n as u32).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges).expect("valid star")
    }

    /// `rows x cols` grid, row-major labels.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = Self::empty(rows * cols);
        let id = |r: usize, c: usize| (r * cols + c) as u32;
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    g.add_edge(id(r, c), id(r, c + 1)).expect("valid grid");
                }
                if r + 1 < rows {
                    g.add_edge(id(r, c), id(r + 1, c)).expect("valid grid");
                }
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn contains(&self, label: u32) -> bool {
        self.index.contains_key(&label)
    }

    pub fn position(&self, label: u32) -> Result<usize> {
        self.index
            .get(&label)
            .copied()
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn label_at(&self, pos: usize) -> u32 {
        self.labels[pos]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> Result<bool> {
        Ok(self.adj.get_unchecked(self.position(u)?, self.position(v)?))
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        self.set_edge(u, v, true)
    }

    pub fn set_edge(&mut self, u: u32, v: u32, present: bool) -> Result<()> {
        let (i, j) = (self.position(u)?, self.position(v)?);
        if i == j {
            return Err(Error::Parse(format!("self-loop at vertex {u}")));
        }
        self.adj.set_unchecked(i, j, present);
        self.adj.set_unchecked(j, i, present);
        Ok(())
    }

    pub fn toggle_edge(&mut self, u: u32, v: u32) -> Result<()> {
        let (i, j) = (self.position(u)?, self.position(v)?);
        if i == j {
            return Err(Error::Parse(format!("self-loop at vertex {u}")));
        }
        self.adj.toggle_unchecked(i, j);
        self.adj.toggle_unchecked(j, i);
        Ok(())
    }

    pub(crate) fn neighbor_positions(&self, pos: usize) -> Vec<usize> {
        self.adj.row_ones(pos)
    }

    /// Neighbour labels, in position order.
    pub fn neighbors(&self, label: u32) -> Result<Vec<u32>> {
        let p = self.position(label)?;
        Ok(self
            .neighbor_positions(p)
            .into_iter()
            .map(|q| self.labels[q])
            .collect())
    }

    pub fn degree(&self, label: u32) -> Result<usize> {
        Ok(self.adj.row_weight(self.position(label)?))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n()).map(|i| self.adj.row_weight(i)).sum::<usize>() / 2
    }

    /// Edges as label pairs, ordered by position of the first endpoint.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n() {
            for j in self.adj.row_ones(i) {
                if j > i {
                    out.push((self.labels[i], self.labels[j]));
                }
            }
        }
        out
    }

    pub fn edge_list(&self) -> EdgeList {
        EdgeList {
            labels: self.labels.clone(),
            edges: self.edges(),
        }
    }

    /// Toggles every edge among the neighbours of `v`.
    pub fn local_complement(&self, v: u32) -> Result<Graph> {
        let mut g = self.clone();
        g.local_complement_in_place(v)?;
        Ok(g)
    }

    pub fn local_complement_in_place(&mut self, v: u32) -> Result<()> {
        let p = self.position(v)?;
        let nb = self.neighbor_positions(p);
        for (a, &i) in nb.iter().enumerate() {
            for &j in &nb[a + 1..] {
                self.adj.toggle_unchecked(i, j);
                self.adj.toggle_unchecked(j, i);
            }
        }
        Ok(())
    }

    pub fn remove_vertex(&self, v: u32) -> Result<Graph> {
        let mut g = self.clone();
        g.remove_vertex_in_place(v)?;
        Ok(g)
    }

    pub fn remove_vertex_in_place(&mut self, v: u32) -> Result<()> {
        let p = self.position(v)?;
        self.adj.remove_row_col(p);
        self.labels.remove(p);
        self.index.remove(&v);
        for (i, &l) in self.labels.iter().enumerate().skip(p) {
            self.index.insert(l, i);
        }
        Ok(())
    }

    /// Appends an isolated vertex.
    pub fn add_vertex(&mut self, label: u32) -> Result<()> {
        if self.contains(label) {
            return Err(Error::DuplicateLabel(label));
        }
        let n = self.n();
        let mut adj = BitMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in self.adj.row_ones(i) {
                adj.set_unchecked(i, j, true);
            }
        }
        self.adj = adj;
        self.labels.push(label);
        self.index.insert(label, n);
        Ok(())
    }

    /// Induced subgraph on `keep`, preserving the original relative order.
    pub fn induced(&self, keep: &[u32]) -> Result<Graph> {
        let mut pos: Vec<usize> = keep
            .iter()
            .map(|&l| self.position(l))
            .collect::<Result<_>>()?;
        pos.sort_unstable();
        pos.dedup();
        let labels = pos.iter().map(|&p| self.labels[p]).collect();
        let adj = self.adj.submatrix(&pos, &pos)?;
        Graph::from_adjacency(labels, adj)
    }

    /// Same graph with vertices relabelled through `f`.
    pub fn relabel(&self, f: impl Fn(u32) -> u32) -> Result<Graph> {
        Graph::from_adjacency(
            self.labels.iter().map(|&l| f(l)).collect(),
            self.adj.clone(),
        )
    }

    /// Connected components as sorted label lists, ordered by smallest position.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(self.labels[u]);
                for w in self.neighbor_positions(u) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// A shortest path from `a` to `b` (inclusive), by BFS with position-ordered expansion.
    pub fn shortest_path(&self, a: u32, b: u32) -> Result<Vec<u32>> {
        let (s, t) = (self.position(a)?, self.position(b)?);
        let mut prev = vec![usize::MAX; self.n()];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for w in self.neighbor_positions(u) {
                if prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            return Err(Error::NoPath(a, b));
        }
        let mut path = vec![t];
        while *path.last().unwrap() != s {
            path.push(prev[*path.last().unwrap()]);
        }
        path.reverse();
        Ok(path.into_iter().map(|p| self.labels[p]).collect())
    }

    /// Equality as labelled graphs, ignoring vertex order.
    pub fn same_labelled_graph(&self, other: &Graph) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut a: Vec<u32> = self.labels.clone();
        let mut b: Vec<u32> = other.labels.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return false;
        }
        let norm = |g: &Graph| {
            let mut e: Vec<(u32, u32)> = g
                .edges()
                .into_iter()
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            e.sort_unstable();
            e
        };
        norm(self) == norm(other)
    }

    /// Correlation operators `K_a = X_a prod_{b in N(a)} Z_b`, one per vertex in position order.
    pub fn stabilizer_generators(&self) -> Vec<Vec<Pauli>> {
        let n = self.n();
        (0..n)
            .map(|a| {
                let mut k = vec![Pauli::I; n];
                k[a] = Pauli::X;
                for b in self.neighbor_positions(a) {
                    k[b] = Pauli::Z;
                }
                k
            })
            .collect()
    }

    /// Row masks of the adjacency matrix, for graphs of at most 64 vertices.
    pub(crate) fn row_masks(&self) -> Option<Vec<u64>> {
        (self.n() <= 64).then(|| {
            (0..self.n())
                .map(|i| self.adj.row_words(i).first().copied().unwrap_or(0))
                .collect()
        })
    }
}

/// Renders a Pauli string such as `XZZ`.
pub fn pauli_string(p: &[Pauli]) -> String {
    p.iter().map(|q| q.symbol()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commute(a: &[Pauli], b: &[Pauli]) -> bool {
        let anti = a
            .iter()
            .zip(b)
            .filter(|(p, q)| **p != Pauli::I && **q != Pauli::I && p != q)
            .count();
        anti % 2 == 0
    }

    #[test]
    fn generators_of_small_graphs() {
        let single = Graph::empty(1).stabilizer_generators();
        assert_eq!(
            single.iter().map(|k| pauli_string(k)).collect::<Vec<_>>(),
            ["X"]
        );
        let edge = Graph::path(2).stabilizer_generators();
        assert_eq!(
            edge.iter().map(|k| pauli_string(k)).collect::<Vec<_>>(),
            ["XZ", "ZX"]
        );
        let tri = Graph::complete(3).stabilizer_generators();
        assert_eq!(
            tri.iter().map(|k| pauli_string(k)).collect::<Vec<_>>(),
            ["XZZ", "ZXZ", "ZZX"]
        );
    }

    #[test]
    fn generators_pairwise_commute() {
        let g = Graph::grid(3, 3);
        let ks = g.stabilizer_generators();
        for a in &ks {
            for b in &ks {
                assert!(commute(a, b));
            }
        }
    }

    #[test]
    fn local_complement_examples() {
        let star = Graph::star(4);
        assert!(star
            .local_complement(0)
            .unwrap()
            .same_labelled_graph(&Graph::complete(4)));
        let tri = Graph::complete(3);
        for v in 0..3 {
            let lc = tri.local_complement(v).unwrap();
            assert_eq!(lc.edge_count(), 2);
            assert_eq!(lc.degree(v).unwrap(), 2);
        }
        let g = Graph::grid(2, 3);
        assert_eq!(
            g.local_complement(1).unwrap().local_complement(1).unwrap(),
            g
        );
        assert!(matches!(g.local_complement(9), Err(Error::UnknownLabel(9))));
    }

    #[test]
    fn local_complement_keeps_degrees_outside_neighbourhood() {
        let g = Graph::grid(3, 3);
        for v in 0..9 {
            let lc = g.local_complement(v).unwrap();
            let nb = g.neighbors(v).unwrap();
            assert_eq!(lc.neighbors(v).unwrap(), nb);
            for u in 0..9 {
                if u != v && !nb.contains(&u) {
                    assert_eq!(lc.degree(u).unwrap(), g.degree(u).unwrap());
                }
            }
        }
    }

    #[test]
    fn removal_keeps_labels_stable() {
        let g = Graph::path(4).remove_vertex(1).unwrap();
        assert_eq!(g.labels(), &[0, 2, 3]);
        assert_eq!(g.edges(), vec![(2, 3)]);
        assert_eq!(g.position(3).unwrap(), 2);
        assert!(g.position(1).is_err());
    }

    #[test]
    fn components_and_paths() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(matches!(g.shortest_path(0, 5), Err(Error::NoPath(0, 5))));
        assert_eq!(Graph::grid(3, 3).shortest_path(0, 8).unwrap().len(), 5);
    }

    #[test]
    fn grid_census() {
        for d in 1..6 {
            let g = Graph::grid(d, d);
            assert_eq!(g.n(), d * d);
            assert_eq!(g.edge_count(), 2 * d * (d - 1));
        }
    }
}
