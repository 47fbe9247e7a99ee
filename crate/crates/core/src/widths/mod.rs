//! Width measures: min over subcubic trees of the max cut value over tree edges.
//!
//! The same optimisation serves three cut functions:
//!
//! - entanglement entropy of a pure state (entanglement width),
//! - `log2` of the Schmidt rank (Schmidt-rank width),
//! - cut-rank of a graph over GF(2) (rank-width).
//!
//! Parties may be single qubits/vertices or blocks of them, so the coarse-grained
//! versions used for encoded states come for free.
//!
//! Two exact engines are provided. [`Strategy::Exact`] is a dynamic program over
//! subsets: root every tree at party 0; for a set `Y` of the other parties, the best
//! subtree hanging below an edge with side `Y` has value
//! `g(Y) = max(cut(Y), min over splits Y = Y1 + Y2 of max(g(Y1), g(Y2)))`, and the
//! width is `g(all parties except 0)`. This costs `O(3^n)` and reaches 16-18 parties.
//! [`Strategy::Enumerate`] walks every tree explicitly and is kept as an independent
//! cross-check for small sizes.

mod tree;

pub use tree::{enumerate_subcubic_trees, tree_count, SubcubicTree};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{rank_gf2, rank_of_rows};
use crate::graphstate::Graph;
use crate::statevec::{spectrum_entropy, Bipartition, PureState, DEFAULT_RANK_TOL};
use tree::{full_mask, MaskTrees};

/// Party ceiling for [`Strategy::Exact`] unless overridden.
pub const DEFAULT_EXACT_LIMIT: usize = 18;

/// Party ceiling for [`Strategy::Enumerate`] (135135 trees at 9 parties).
pub const ENUMERATION_LIMIT: usize = 9;

/// Symmetric set function on parties `0..parties()`.
pub trait CutFunction: Sync {
    fn parties(&self) -> usize;

    /// Value of the cut separating the parties in `mask` from the rest.
    fn value(&self, mask: u64) -> f64;
}

#[derive(Clone, Debug, Default)]
pub enum Strategy {
    /// Subset dynamic program; errors above the party limit.
    #[default]
    Exact,
    /// Explicit enumeration of all trees; errors above [`ENUMERATION_LIMIT`].
    Enumerate,
    /// Evaluate the given tree only (an upper bound).
    Candidate(SubcubicTree),
    /// Exact up to the limit, otherwise the best of a few heuristic trees.
    Auto,
}

#[derive(Clone, Debug)]
pub struct WidthOptions {
    pub strategy: Strategy,
    pub exact_limit: usize,
}

impl Default for WidthOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Exact,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

impl WidthOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SubsetDp,
    Enumeration,
    Candidate,
    Heuristic,
}

/// One tree edge of a witness decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCut {
    pub edge: (usize, usize),
    /// Parties on the side not containing the first leaf.
    pub side: Vec<u32>,
    pub value: f64,
}

/// Width value with its witness tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub value: f64,
    /// `true` when `value` is the exact minimum, `false` for an upper bound.
    pub exact: bool,
    pub method: Method,
    pub tree: SubcubicTree,
    pub cuts: Vec<EdgeCut>,
}

impl WidthReport {
    /// `value` rounded to the nearest integer (for integer-valued cut functions).
    pub fn integer(&self) -> usize {
        self.value.round() as usize
    }
}

/// Minimises the max edge cut over subcubic trees whose leaves are `labels`
/// (`labels[i]` names party `i`).
pub fn optimize(cut: &dyn CutFunction, labels: &[u32], opts: &WidthOptions) -> Result<WidthReport> {
    let p = cut.parties();
    if labels.len() != p {
        return Err(Error::Dimension(format!(
            "{} labels for {p} parties",
            labels.len()
        )));
    }
    if p == 0 {
        return Err(Error::Dimension("width of an empty system".into()));
    }
    if p > 64 {
        return Err(Error::SizeLimit {
            what: "width parties",
            n: p,
            limit: 64,
        });
    }
    let (masks, exact, method) = match &opts.strategy {
        Strategy::Exact => {
            check_limit(p, opts.exact_limit, "exact width search")?;
            (subset_dp(cut), true, Method::SubsetDp)
        }
        Strategy::Enumerate => {
            check_limit(
                p,
                ENUMERATION_LIMIT.min(opts.exact_limit),
                "tree enumeration",
            )?;
            (enumerate_best(cut), true, Method::Enumeration)
        }
        Strategy::Candidate(t) => (candidate_masks(t, labels)?, false, Method::Candidate),
        Strategy::Auto if p <= opts.exact_limit => (subset_dp(cut), true, Method::SubsetDp),
        Strategy::Auto => (heuristic(cut), false, Method::Heuristic),
    };
    Ok(report(cut, labels, masks, exact, method))
}

fn check_limit(p: usize, limit: usize, what: &'static str) -> Result<()> {
    if p > limit {
        Err(Error::SizeLimit { what, n: p, limit })
    } else {
        Ok(())
    }
}

fn report(
    cut: &dyn CutFunction,
    labels: &[u32],
    masks: Vec<u64>,
    exact: bool,
    method: Method,
) -> WidthReport {
    let tree = SubcubicTree::from_masks(labels.to_vec(), masks);
    let cuts: Vec<EdgeCut> = tree
        .edges()
        .iter()
        .zip(tree.edge_masks())
        .enumerate()
        .map(|(e, (&edge, &m))| EdgeCut {
            edge,
            side: tree.side_of(e),
            value: cut.value(m),
        })
        .collect();
    let value = cuts.iter().map(|c| c.value).fold(0.0, f64::max);
    WidthReport {
        value,
        exact,
        method,
        tree,
        cuts,
    }
}

/// Cut values for every mask not containing party 0, indexed by `mask >> 1`.
fn cut_table(cut: &dyn CutFunction) -> Vec<f64> {
    let p = cut.parties();
    (0..1usize << (p - 1))
        .into_par_iter()
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                cut.value((i as u64) << 1)
            }
        })
        .collect()
}

fn subset_dp(cut: &dyn CutFunction) -> Vec<u64> {
    let p = cut.parties();
    if p == 1 {
        return Vec::new();
    }
    let f = cut_table(cut);
    let size = f.len();
    let mut g = vec![0.0f64; size];
    let mut split = vec![0u64; size];
    for idx in 1..size {
        let y = (idx as u64) << 1;
        let fy = f[idx];
        if y.count_ones() == 1 {
            g[idx] = fy;
            continue;
        }
        let low = y & y.wrapping_neg();
        let rest = y ^ low;
        let mut best = f64::INFINITY;
        let mut arg = 0u64;
        // Y1 = low + any proper subset of rest
        let mut sub = (rest - 1) & rest;
        loop {
            let y1 = low | sub;
            let y2 = y ^ y1;
            let v = g[(y1 >> 1) as usize].max(g[(y2 >> 1) as usize]);
            if v < best {
                best = v;
                arg = y1;
                if best <= fy {
                    break;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        g[idx] = fy.max(best);
        split[idx] = arg;
    }
    let mut masks = Vec::with_capacity(2 * p - 3);
    let mut stack = vec![full_mask(p) & !1];
    while let Some(y) = stack.pop() {
        masks.push(y);
        if y.count_ones() >= 2 {
            let y1 = split[(y >> 1) as usize];
            stack.push(y1);
            stack.push(y ^ y1);
        }
    }
    masks
}

fn enumerate_best(cut: &dyn CutFunction) -> Vec<u64> {
    let p = cut.parties();
    if p == 1 {
        return Vec::new();
    }
    let f = cut_table(cut);
    let value = |m: &[u64]| m.iter().map(|&x| f[(x >> 1) as usize]).fold(0.0, f64::max);
    // Split the stream at a small prefix size and search the subtrees in parallel;
    // the reduction keeps the first minimum in stream order, so the schedule is irrelevant.
    let split_at = p.min(6);
    let prefixes: Vec<Vec<u64>> = MaskTrees::new(split_at).collect();
    prefixes
        .par_iter()
        .enumerate()
        .map(|(i, pre)| {
            let mut best: Option<(f64, Vec<u64>)> = None;
            for t in MaskTrees::from_prefix(p, pre.clone()) {
                let v = value(&t);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, t));
                }
            }
            let (v, t) = best.expect("every prefix extends to at least one tree");
            (v, i, t)
        })
        .reduce_with(|a, b| {
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .map(|(_, _, t)| t)
        .expect("at least one tree")
}

fn candidate_masks(t: &SubcubicTree, labels: &[u32]) -> Result<Vec<u64>> {
    let mut sorted_t = t.leaves().to_vec();
    sorted_t.sort_unstable();
    let mut sorted_l = labels.to_vec();
    sorted_l.sort_unstable();
    if sorted_t != sorted_l {
        return Err(Error::StructureCheck(
            "candidate tree leaves do not match the parties".into(),
        ));
    }
    let party_of: Vec<usize> = t
        .leaves()
        .iter()
        .map(|l| labels.iter().position(|x| x == l).expect("checked above"))
        .collect();
    let p = labels.len();
    let to_party = |m: u64| {
        (0..p)
            .filter(|&i| m >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | 1 << party_of[i])
    };
    // re-root at party 0
    let full = full_mask(p);
    Ok(t.edge_masks()
        .iter()
        .map(|&m| {
            let pm = to_party(m);
            if pm & 1 == 1 {
                full & !pm
            } else {
                pm
            }
        })
        .collect())
}

/// Best of a caterpillar and a balanced bisection tree, both in party order.
fn heuristic(cut: &dyn CutFunction) -> Vec<u64> {
    let p = cut.parties();
    let cater = SubcubicTree::caterpillar((0..p as u32).collect())
        .edge_masks()
        .to_vec();
    let balanced = balanced_masks(p);
    let score = |m: &[u64]| m.iter().map(|&x| cut.value(x)).fold(0.0, f64::max);
    if score(&balanced) < score(&cater) {
        balanced
    } else {
        cater
    }
}

fn balanced_masks(p: usize) -> Vec<u64> {
    fn split(lo: usize, hi: usize, out: &mut Vec<u64>) {
        let m = full_mask(hi) & !full_mask(lo);
        out.push(m);
        if hi - lo >= 2 {
            let mid = lo + (hi - lo) / 2;
            split(lo, mid, out);
            split(mid, hi, out);
        }
    }
    let mut out = Vec::new();
    if p >= 2 {
        split(1, p, &mut out);
    }
    out
}

/// Cut-rank of a graph with vertices grouped into parties.
pub struct GraphCutRank<'a> {
    graph: &'a Graph,
    blocks: Vec<Vec<usize>>,
    rows: Option<Vec<u64>>,
    block_masks: Option<Vec<u64>>,
}

impl<'a> GraphCutRank<'a> {
    /// One party per vertex, in vertex order.
    pub fn new(graph: &'a Graph) -> Self {
        let blocks = (0..graph.n()).map(|i| vec![i]).collect();
        Self::build(graph, blocks)
    }

    /// Parties are the given disjoint, covering blocks of vertex labels.
    pub fn with_blocks(graph: &'a Graph, blocks: &[Vec<u32>]) -> Result<Self> {
        let pos = blocks_to_positions(blocks, graph.labels(), |l| graph.position(l))?;
        Ok(Self::build(graph, pos))
    }

    fn build(graph: &'a Graph, blocks: Vec<Vec<usize>>) -> Self {
        let rows = graph.row_masks();
        let block_masks = rows.as_ref().map(|_| {
            blocks
                .iter()
                .map(|b| b.iter().fold(0u64, |m, &q| m | 1 << q))
                .collect()
        });
        Self {
            graph,
            blocks,
            rows,
            block_masks,
        }
    }
}

impl CutFunction for GraphCutRank<'_> {
    fn parties(&self) -> usize {
        self.blocks.len()
    }

    fn value(&self, mask: u64) -> f64 {
        if let (Some(rows), Some(bm)) = (&self.rows, &self.block_masks) {
            let a = (0..bm.len())
                .filter(|&i| mask >> i & 1 == 1)
                .fold(0u64, |m, i| m | bm[i]);
            let b = full_mask(self.graph.n()) & !a;
            let mut sub: Vec<u64> = (0..self.graph.n())
                .filter(|&q| a >> q & 1 == 1)
                .map(|q| rows[q] & b)
                .collect();
            return rank_of_rows(&mut sub) as f64;
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, blk) in self.blocks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.extend(blk)
            } else {
                b.extend(blk)
            }
        }
        let sub = self
            .graph
            .adjacency()
            .submatrix(&a, &b)
            .expect("positions are in range");
        rank_gf2(&sub) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateCutKind {
    /// Von Neumann entropy in bits.
    Entropy,
    /// `log2` of the number of Schmidt coefficients above `tol` (in probability).
    LogSchmidtRank { tol: f64 },
}

/// Entropic or Schmidt-rank cut of a pure state with qubits grouped into parties.
pub struct StateCut<'a> {
    state: &'a PureState,
    block_masks: Vec<u64>,
    kind: StateCutKind,
}

impl<'a> StateCut<'a> {
    pub fn new(state: &'a PureState, kind: StateCutKind) -> Self {
        Self {
            state,
            block_masks: (0..state.n()).map(|q| 1u64 << q).collect(),
            kind,
        }
    }

    pub fn with_blocks(
        state: &'a PureState,
        blocks: &[Vec<u32>],
        kind: StateCutKind,
    ) -> Result<Self> {
        let pos = blocks_to_positions(blocks, state.labels(), |l| state.position(l))?;
        let block_masks = pos
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &q| m | 1 << q))
            .collect();
        Ok(Self {
            state,
            block_masks,
            kind,
        })
    }
}

impl CutFunction for StateCut<'_> {
    fn parties(&self) -> usize {
        self.block_masks.len()
    }

    fn value(&self, mask: u64) -> f64 {
        let q = (0..self.block_masks.len())
            .filter(|&i| mask >> i & 1 == 1)
            .fold(0u64, |m, i| m | self.block_masks[i]);
        let spec = self.state.spectrum_of_mask(q);
        match self.kind {
            StateCutKind::Entropy => spectrum_entropy(&spec),
            StateCutKind::LogSchmidtRank { tol } => {
                (spec.iter().filter(|&&l| l > tol).count() as f64).log2()
            }
        }
    }
}

fn blocks_to_positions(
    blocks: &[Vec<u32>],
    labels: &[u32],
    position: impl Fn(u32) -> Result<usize>,
) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; labels.len()];
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        if b.is_empty() {
            return Err(Error::InvalidBipartition("empty party block".into()));
        }
        let mut pos = Vec::with_capacity(b.len());
        for &l in b {
            let p = position(l)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::DuplicateLabel(l));
            }
            pos.push(p);
        }
        out.push(pos);
    }
    if let Some(p) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidBipartition(format!(
            "label {} is in no party block",
            labels[p]
        )));
    }
    Ok(out)
}

/// Party labels for blocks: block `i` is named `i`.
fn block_labels(k: usize) -> Vec<u32> {
    (0..k as u32).collect()
}

/// Entanglement width (bits), qubits as parties.
pub fn entanglement_width(s: &PureState, opts: &WidthOptions) -> Result<WidthReport> {
    optimize(&StateCut::new(s, StateCutKind::Entropy), s.labels(), opts)
}

/// Schmidt-rank width (bits), qubits as parties.
pub fn schmidt_rank_width(s: &PureState, opts: &WidthOptions) -> Result<WidthReport> {
    optimize(
        &StateCut::new(
            s,
            StateCutKind::LogSchmidtRank {
                tol: DEFAULT_RANK_TOL,
            },
        ),
        s.labels(),
        opts,
    )
}

/// Rank-width of a graph.
pub fn rank_width(g: &Graph, opts: &WidthOptions) -> Result<WidthReport> {
    optimize(&GraphCutRank::new(g), g.labels(), opts)
}

/// Width of `s` with parties given by `blocks` (party `i` is block `i`).
pub fn state_width_blocks(
    s: &PureState,
    blocks: &[Vec<u32>],
    kind: StateCutKind,
    opts: &WidthOptions,
) -> Result<WidthReport> {
    optimize(
        &StateCut::with_blocks(s, blocks, kind)?,
        &block_labels(blocks.len()),
        opts,
    )
}

/// Rank-width of `g` with vertices grouped into parties.
pub fn rank_width_blocks(
    g: &Graph,
    blocks: &[Vec<u32>],
    opts: &WidthOptions,
) -> Result<WidthReport> {
    optimize(
        &GraphCutRank::with_blocks(g, blocks)?,
        &block_labels(blocks.len()),
        opts,
    )
}

/// GF(2) rank of the adjacency block between the two sides.
pub fn cut_rank(g: &Graph, p: &Bipartition) -> Result<usize> {
    let mut all: Vec<u32> = p.side_a.iter().chain(&p.side_b).copied().collect();
    all.sort_unstable();
    let mut mine = g.labels().to_vec();
    mine.sort_unstable();
    if all != mine || p.side_a.is_empty() || p.side_b.is_empty() {
        return Err(Error::InvalidBipartition(format!(
            "{:?} | {:?} does not split the graph",
            p.side_a, p.side_b
        )));
    }
    let a: Vec<usize> = p
        .side_a
        .iter()
        .map(|&l| g.position(l))
        .collect::<Result<_>>()?;
    let b: Vec<usize> = p
        .side_b
        .iter()
        .map(|&l| g.position(l))
        .collect::<Result<_>>()?;
    Ok(rank_gf2(&g.adjacency().submatrix(&a, &b)?))
}
