//! State families and the size ranges they are evaluated on.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use mqc_lab::graphstate::io::read_graph;
use mqc_lab::lattices::{generate_lattice, LatticeKind, LatticeSpec};
use mqc_lab::{Graph, GraphState, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Path graph on `n` qubits.
    LinearCluster,
    /// Cycle graph on `n >= 3` qubits.
    Ring,
    /// `n`-qubit GHZ state (star graph up to local Hadamards).
    Ghz,
    /// `n`-qubit W state; not a graph state.
    W,
    /// Random labelled tree on `n` vertices drawn from the seed.
    Tree,
    /// `d x d` square cluster.
    Grid,
    /// Hexagonal patch of extent `d x d`.
    Hexagonal,
    /// Triangular patch of extent `d x d`.
    Triangular,
    /// Kagome patch of extent `d x d`.
    Kagome,
    /// A single graph read from `--file`.
    File,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::LinearCluster => "linear_cluster",
            FamilyKind::Ring => "ring",
            FamilyKind::Ghz => "ghz",
            FamilyKind::W => "w",
            FamilyKind::Tree => "tree",
            FamilyKind::Grid => "grid",
            FamilyKind::Hexagonal => "hexagonal",
            FamilyKind::Triangular => "triangular",
            FamilyKind::Kagome => "kagome",
            FamilyKind::File => "file",
        }
    }

    fn min_size(self) -> usize {
        match self {
            FamilyKind::Ghz | FamilyKind::W => 2,
            FamilyKind::Ring => 3,
            _ => 1,
        }
    }

    /// Whether the size is a side length rather than a qubit count.
    pub fn size_is_extent(self) -> bool {
        matches!(
            self,
            FamilyKind::Grid | FamilyKind::Hexagonal | FamilyKind::Triangular | FamilyKind::Kagome
        )
    }
}

/// Parses `A..B` (inclusive) or a comma-separated list such as `2,3,5`.
pub fn parse_sizes(text: &str) -> anyhow::Result<Vec<usize>> {
    let text = text.trim();
    let sizes: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .with_context(|| format!("bad size range start in {text:?}"))?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("bad size range end in {text:?}"))?;
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad size {s:?}"))
            })
            .collect::<anyhow::Result<_>>()?
    };
    if sizes.is_empty() {
        bail!(UsageError(format!("size range {text:?} is empty")));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        bail!(UsageError(format!(
            "sizes must be strictly increasing, got {text:?}"
        )));
    }
    Ok(sizes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub sizes: Vec<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl FamilySpec {
    pub fn new(
        kind: FamilyKind,
        sizes: Option<Vec<usize>>,
        seed: u64,
        file: Option<&Path>,
    ) -> anyhow::Result<Self> {
        match (kind, sizes, file) {
            (FamilyKind::File, None, Some(path)) => {
                let g = read_graph(path)?;
                Ok(Self {
                    kind,
                    sizes: vec![g.n()],
                    seed,
                    file: Some(path.to_path_buf()),
                })
            }
            (FamilyKind::File, Some(_), _) => {
                bail!(UsageError("the file family takes no --sizes".into()))
            }
            (FamilyKind::File, None, None) => {
                bail!(UsageError("the file family needs --file".into()))
            }
            (_, _, Some(_)) => bail!(UsageError("--file is only valid with --family file".into())),
            (_, None, None) => bail!(UsageError(format!(
                "--sizes is required for the {} family",
                kind.name()
            ))),
            (_, Some(sizes), None) => {
                if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) {
                    bail!(UsageError(
                        "sizes must be non-empty and strictly increasing".into()
                    ));
                }
                if sizes[0] < kind.min_size() {
                    bail!(UsageError(format!(
                        "the {} family needs sizes >= {}",
                        kind.name(),
                        kind.min_size()
                    )));
                }
                Ok(Self {
                    kind,
                    sizes,
                    seed,
                    file: None,
                })
            }
        }
    }

    pub fn instance(&self, size: usize) -> anyhow::Result<Instance> {
        let graph = match self.kind {
            FamilyKind::LinearCluster => Some(Graph::path(size)),
            FamilyKind::Ring => Some(Graph::cycle(size)),
            FamilyKind::Ghz => Some(Graph::star(size)),
            FamilyKind::W => None,
            FamilyKind::Tree => Some(random_tree(size, self.seed)),
            FamilyKind::Grid => Some(Graph::grid(size, size)),
            FamilyKind::Hexagonal | FamilyKind::Triangular | FamilyKind::Kagome => {
                let kind = match self.kind {
                    FamilyKind::Hexagonal => LatticeKind::Hexagonal,
                    FamilyKind::Triangular => LatticeKind::Triangular,
                    _ => LatticeKind::Kagome,
                };
                Some(
                    generate_lattice(&LatticeSpec::new(kind, size, size))?
                        .graph()
                        .clone(),
                )
            }
            FamilyKind::File => {
                let path = self.file.as_ref().expect("file family carries a path");
                Some(read_graph(path)?)
            }
        };
        let qubits = graph.as_ref().map_or(size, Graph::n);
        Ok(Instance {
            kind: self.kind,
            size,
            qubits,
            graph,
        })
    }
}

/// Random recursive tree: vertex `i` attaches to a uniform earlier vertex. The stream
/// is keyed by `n` so each size is reproducible on its own.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut g = Graph::empty(n);
    for i in 1..n as u32 {
        let j = rng.gen_range(0..i);
        g.add_edge(i, j).expect("labels in range");
    }
    g
}

/// One member of a family.
#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: FamilyKind,
    pub size: usize,
    pub qubits: usize,
    /// Graph of the state, when it is a graph state (up to local unitaries).
    pub graph: Option<Graph>,
}

impl Instance {
    /// Dense state vector, labels `0..qubits` for generated families.
    pub fn state(&self, limit: usize) -> mqc_lab::Result<PureState> {
        if self.qubits > limit {
            return Err(mqc_lab::Error::SizeLimit {
                what: "state vector",
                n: self.qubits,
                limit,
            });
        }
        match self.kind {
            FamilyKind::W => Ok(PureState::w(self.size)),
            FamilyKind::Ghz => Ok(PureState::ghz(self.size)),
            _ => GraphState::new(self.graph.clone().expect("graph family")).to_statevector(limit),
        }
    }
}
