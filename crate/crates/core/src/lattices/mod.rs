//! Lattice graph states, the hexagonal → triangular → Kagome → square conversion chain
//! and the adaptive measurement-pattern executor.
//!
//! All four lattices live on one coordinate system. Triangular-lattice points `(i, j)`
//! have the six neighbours `(±1, 0)`, `(0, ±1)`, `(1, -1)`, `(-1, 1)`. The hexagonal
//! lattice uses those points as one sublattice and the centres `(x, y)` of the
//! up-triangles `{(x, y), (x+1, y), (x, y+1)}` as the other; each centre is joined to
//! the three corners of its triangle. The Kagome lattice is the triangular lattice with
//! every point whose coordinates are both even removed. Square-lattice points are
//! plain grid coordinates.

mod conversion;
pub mod gates;
mod pattern;

pub use conversion::{
    conversion_patch, hex_to_triangular, kagome_to_square, overhead_point, overhead_series,
    run_conversion_chain, triangular_to_kagome, verify_stage, ChainOptions, ConversionReport,
    Outcomes, OverheadFit, OverheadPoint, Stage, StageCheck, StageOp, StageReport, FIDELITY_TOL,
};
pub use pattern::{
    basis_vector, execute_pattern, prepare_resource, verify_pattern, Basis, Branch, Byproduct,
    MeasurementPattern, OutcomeSource, PatternCheck, Step,
};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Square,
    Hexagonal,
    Triangular,
    Kagome,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 4] = [
        LatticeKind::Square,
        LatticeKind::Hexagonal,
        LatticeKind::Triangular,
        LatticeKind::Kagome,
    ];

    /// Degree of every vertex whose lattice neighbours are all present.
    pub fn bulk_degree(self) -> usize {
        match self {
            LatticeKind::Square | LatticeKind::Kagome => 4,
            LatticeKind::Hexagonal => 3,
            LatticeKind::Triangular => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Square => "square",
            LatticeKind::Hexagonal => "hexagonal",
            LatticeKind::Triangular => "triangular",
            LatticeKind::Kagome => "kagome",
        }
    }

    /// Neighbours of `site` in the infinite lattice of this kind.
    pub fn neighbors(self, site: Site) -> Vec<Site> {
        let (x, y) = (site.x, site.y);
        match (self, site.sub) {
            (LatticeKind::Square, _) => [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .map(|(a, b)| Site::point(x + a, y + b))
                .to_vec(),
            (LatticeKind::Triangular, _) => TRIANGULAR_STEPS
                .map(|(a, b)| Site::point(x + a, y + b))
                .to_vec(),
            (LatticeKind::Kagome, _) => TRIANGULAR_STEPS
                .map(|(a, b)| Site::point(x + a, y + b))
                .into_iter()
                .filter(|s| is_kagome_point(s.x, s.y))
                .collect(),
            (LatticeKind::Hexagonal, Sublattice::Point) => [(x, y), (x - 1, y), (x, y - 1)]
                .map(|(a, b)| Site::center(a, b))
                .to_vec(),
            (LatticeKind::Hexagonal, Sublattice::Center) => [(x, y), (x + 1, y), (x, y + 1)]
                .map(|(a, b)| Site::point(a, b))
                .to_vec(),
        }
    }

    /// Whether `site` belongs to the infinite lattice of this kind.
    pub fn contains(self, site: Site) -> bool {
        match self {
            LatticeKind::Hexagonal => true,
            LatticeKind::Kagome => site.sub == Sublattice::Point && is_kagome_point(site.x, site.y),
            _ => site.sub == Sublattice::Point,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LatticeKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown lattice kind {s:?}")))
    }
}

pub(crate) const TRIANGULAR_STEPS: [(i32, i32); 6] =
    [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

fn is_kagome_point(x: i32, y: i32) -> bool {
    x.rem_euclid(2) == 1 || y.rem_euclid(2) == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sublattice {
    /// A triangular-lattice point (or a grid point for the square lattice).
    Point,
    /// An up-triangle centre; only present on the hexagonal lattice.
    Center,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub sub: Sublattice,
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub fn point(x: i32, y: i32) -> Self {
        Self {
            sub: Sublattice::Point,
            x,
            y,
        }
    }

    pub fn center(x: i32, y: i32) -> Self {
        Self {
            sub: Sublattice::Center,
            x,
            y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    /// Number of cells along each direction: grid points for the square and
    /// triangular lattices, hexagons for the hexagonal lattice and three-site unit
    /// cells for the Kagome lattice.
    pub extent: (usize, usize),
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, d1: usize, d2: usize) -> Self {
        Self {
            kind,
            extent: (d1, d2),
        }
    }

    /// Closed-form `(vertices, edges)` of the generated patch.
    pub fn census(&self) -> (usize, usize) {
        let (d1, d2) = self.extent;
        match self.kind {
            LatticeKind::Square => (d1 * d2, d1 * (d2 - 1) + d2 * (d1 - 1)),
            LatticeKind::Triangular => {
                (d1 * d2, d1 * (d2 - 1) + d2 * (d1 - 1) + (d1 - 1) * (d2 - 1))
            }
            LatticeKind::Hexagonal => (
                2 * (d1 + 1) * (d2 + 1) - 2,
                3 * d1 * d2 + 2 * d1 + 2 * d2 - 1,
            ),
            LatticeKind::Kagome => (3 * d1 * d2, 6 * d1 * d2 - 2 * d1 - 2 * d2 + 1),
        }
    }
}

/// A finite piece of a lattice: a graph whose vertex labels carry coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    kind: LatticeKind,
    labels: Vec<u32>,
    sites: Vec<Site>,
    index: HashMap<Site, u32>,
    graph: Graph,
}

impl Lattice {
    /// Patch with the given labelled sites and all lattice edges between them.
    pub fn from_sites(kind: LatticeKind, labelled: Vec<(u32, Site)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labelled.len());
        for &(l, s) in &labelled {
            if !kind.contains(s) {
                return Err(Error::StructureCheck(format!(
                    "{s:?} is not a {kind} lattice site"
                )));
            }
            if index.insert(s, l).is_some() {
                return Err(Error::StructureCheck(format!("site {s:?} listed twice")));
            }
        }
        let (labels, sites): (Vec<u32>, Vec<Site>) = labelled.into_iter().unzip();
        let mut graph = Graph::with_labels(labels.clone())?;
        for (&l, &s) in labels.iter().zip(&sites) {
            for t in kind.neighbors(s) {
                if let Some(&m) = index.get(&t) {
                    if l < m {
                        graph.add_edge(l, m)?;
                    }
                }
            }
        }
        Ok(Self {
            kind,
            labels,
            sites,
            index,
            graph,
        })
    }

    /// Patch on `sites`, labelled `0..n` in sorted site order.
    pub fn from_site_set(kind: LatticeKind, sites: &BTreeSet<Site>) -> Result<Self> {
        Self::from_sites(
            kind,
            sites
                .iter()
                .enumerate()
                .map(|(i, &s)| (i as u32, s))
                .collect(),
        )
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site_of(&self, label: u32) -> Option<Site> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.sites[i])
    }

    pub fn label_of(&self, site: Site) -> Option<u32> {
        self.index.get(&site).copied()
    }

    /// Labels whose every lattice neighbour is part of the patch.
    pub fn bulk(&self) -> Vec<u32> {
        self.labels
            .iter()
            .zip(&self.sites)
            .filter(|(_, &s)| {
                self.kind
                    .neighbors(s)
                    .iter()
                    .all(|t| self.index.contains_key(t))
            })
            .map(|(&l, _)| l)
            .collect()
    }

    /// Checks that `g` is exactly this patch as a labelled graph.
    pub fn matches(&self, g: &Graph) -> bool {
        self.graph.same_labelled_graph(g)
    }

    /// Number of complete hexagons (hexagonal patches only).
    pub fn hexagon_count(&self) -> usize {
        if self.kind != LatticeKind::Hexagonal {
            return 0;
        }
        let corners: BTreeSet<(i32, i32)> = self
            .sites
            .iter()
            .filter(|s| s.sub == Sublattice::Point)
            .map(|s| (s.x - 1, s.y - 1))
            .collect();
        corners
            .into_iter()
            .filter(|&(x, y)| hexagon(x, y).iter().all(|s| self.index.contains_key(s)))
            .count()
    }
}

/// The six sites around the hexagon centred on the down-triangle
/// `{(x+1, y), (x, y+1), (x+1, y+1)}`.
pub fn hexagon(x: i32, y: i32) -> [Site; 6] {
    [
        Site::point(x + 1, y),
        Site::center(x + 1, y),
        Site::point(x + 1, y + 1),
        Site::center(x, y + 1),
        Site::point(x, y + 1),
        Site::center(x, y),
    ]
}

/// The patch of `spec.kind` with `spec.extent` cells, labelled `0..n` in sorted site
/// order (for the square lattice, `(u, v)` gets label `u * d2 + v`).
pub fn generate_lattice(spec: &LatticeSpec) -> Result<Lattice> {
    let (d1, d2) = spec.extent;
    if d1 == 0 || d2 == 0 {
        return Err(Error::Dimension(format!(
            "lattice extent must be at least (1, 1), got ({d1}, {d2})"
        )));
    }
    let (e1, e2) = (d1 as i32, d2 as i32);
    let mut sites = BTreeSet::new();
    for a in 0..e1 {
        for b in 0..e2 {
            match spec.kind {
                LatticeKind::Square | LatticeKind::Triangular => {
                    sites.insert(Site::point(a, b));
                }
                LatticeKind::Hexagonal => sites.extend(hexagon(a, b)),
                LatticeKind::Kagome => {
                    sites.extend([
                        Site::point(2 * a + 1, 2 * b + 1),
                        Site::point(2 * a + 2, 2 * b + 1),
                        Site::point(2 * a + 1, 2 * b + 2),
                    ]);
                }
            }
        }
    }
    Lattice::from_site_set(spec.kind, &sites)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_two_by_two_is_a_four_cycle() {
        let l = generate_lattice(&LatticeSpec::new(LatticeKind::Square, 2, 2)).unwrap();
        assert_eq!(l.graph().edge_count(), 4);
        assert!(l
            .graph()
            .labels()
            .iter()
            .all(|&v| l.graph().degree(v).unwrap() == 2));
    }

    #[test]
    fn square_matches_grid_labels() {
        let l = generate_lattice(&LatticeSpec::new(LatticeKind::Square, 3, 5)).unwrap();
        assert!(l.matches(&Graph::grid(3, 5)));
    }

    #[test]
    fn census_matches_generated_patches() {
        for kind in LatticeKind::ALL {
            for d1 in 1..=5 {
                for d2 in 1..=5 {
                    let spec = LatticeSpec::new(kind, d1, d2);
                    let l = generate_lattice(&spec).unwrap();
                    assert_eq!(
                        (l.graph().n(), l.graph().edge_count()),
                        spec.census(),
                        "{kind} {d1}x{d2}"
                    );
                }
            }
        }
    }

    #[test]
    fn bulk_degrees() {
        for kind in LatticeKind::ALL {
            let l = generate_lattice(&LatticeSpec::new(kind, 4, 4)).unwrap();
            let bulk = l.bulk();
            assert!(!bulk.is_empty(), "{kind}");
            for v in bulk {
                assert_eq!(l.graph().degree(v).unwrap(), kind.bulk_degree(), "{kind}");
            }
            let max = l
                .labels()
                .iter()
                .map(|&v| l.graph().degree(v).unwrap())
                .max()
                .unwrap();
            assert_eq!(max, kind.bulk_degree());
        }
    }

    #[test]
    fn hexagon_count_of_generated_patch() {
        for (d1, d2) in [(1, 1), (2, 3), (4, 4)] {
            let l = generate_lattice(&LatticeSpec::new(LatticeKind::Hexagonal, d1, d2)).unwrap();
            assert_eq!(l.hexagon_count(), d1 * d2);
        }
    }

    #[test]
    fn single_hexagon_is_a_six_cycle() {
        let l = generate_lattice(&LatticeSpec::new(LatticeKind::Hexagonal, 1, 1)).unwrap();
        assert_eq!(
            (
                l.graph().n(),
                l.graph().edge_count(),
                l.graph().components().len()
            ),
            (6, 6, 1)
        );
        assert!(l
            .labels()
            .iter()
            .all(|&v| l.graph().degree(v).unwrap() == 2));
    }

    #[test]
    fn rejects_foreign_sites_and_empty_extent() {
        assert!(Lattice::from_sites(LatticeKind::Kagome, vec![(0, Site::point(2, 4))]).is_err());
        assert!(Lattice::from_sites(LatticeKind::Square, vec![(0, Site::center(0, 0))]).is_err());
        assert!(generate_lattice(&LatticeSpec::new(LatticeKind::Square, 0, 3)).is_err());
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in LatticeKind::ALL {
            assert_eq!(k.name().parse::<LatticeKind>().unwrap(), k);
        }
    }
}
