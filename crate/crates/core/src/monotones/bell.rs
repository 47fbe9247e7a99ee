//! Deterministic Bell-pair localization on graph states by Pauli measurements.
//!
//! For vertices `a`, `b` joined by a shortest (hence induced) path, measuring `Z` on
//! every vertex off the path leaves the path graph; measuring `Y` on the interior path
//! vertices, starting next to `a`, shortens it one vertex at a time until only the
//! edge `a - b` remains. After each measurement the outcome-dependent local Clifford
//! on the former neighbours is undone, so every branch ends in the same two-qubit
//! graph state, which is maximally entangled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::{Clifford, Graph, GraphState, Pauli};
use crate::statevec::{Bipartition, PureState};

/// One Pauli measurement with its correction rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliStep {
    pub qubit: u32,
    pub basis: Pauli,
    /// Qubits that receive the correction after the outcome `k` is known: the inverse
    /// of `Z^k` (for `Z`) or of `sqrt((-1)^k (-i Z))` (for `Y`) on each of them.
    pub correct: Vec<u32>,
}

impl PauliStep {
    /// Unitary applied to each corrected qubit after outcome `k`.
    pub fn correction(&self, k: u8) -> Clifford {
        match self.basis {
            Pauli::Y => Clifford::y_correction(k).inverse(),
            _ => Clifford::z_correction(k).inverse(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellPattern {
    pub a: u32,
    pub b: u32,
    pub path: Vec<u32>,
    pub steps: Vec<PauliStep>,
}

/// Builds the Pauli pattern leaving a Bell pair (the edge graph state) on `a`, `b`.
pub fn bell_localization_pattern(g: &Graph, a: u32, b: u32) -> Result<BellPattern> {
    if a == b {
        return Err(Error::InvalidBipartition(format!(
            "Bell pair needs two distinct qubits, got {a} twice"
        )));
    }
    let path = g.shortest_path(a, b)?;
    let mut current = g.clone();
    let mut steps = Vec::new();
    let on_path: std::collections::HashSet<u32> = path.iter().copied().collect();
    let mut measure = |q: u32, basis: Pauli, current: &mut Graph| -> Result<()> {
        let correct = current.neighbors(q)?;
        if basis == Pauli::Y {
            current.local_complement_in_place(q)?;
        }
        current.remove_vertex_in_place(q)?;
        steps.push(PauliStep {
            qubit: q,
            basis,
            correct,
        });
        Ok(())
    };
    for &q in g.labels() {
        if !on_path.contains(&q) {
            measure(q, Pauli::Z, &mut current)?;
        }
    }
    for &q in &path[1..path.len() - 1] {
        measure(q, Pauli::Y, &mut current)?;
    }
    Ok(BellPattern { a, b, path, steps })
}

/// Runs the pattern on the graph-state representation for one outcome assignment and
/// returns the final state (which should be the bare edge `a - b`).
pub fn run_on_graph(g: &Graph, pattern: &BellPattern, outcomes: &[u8]) -> Result<GraphState> {
    if outcomes.len() != pattern.steps.len() {
        return Err(Error::Dimension(format!(
            "{} outcomes for {} steps",
            outcomes.len(),
            pattern.steps.len()
        )));
    }
    let mut gs = GraphState::new(g.clone());
    for (step, &k) in pattern.steps.iter().zip(outcomes) {
        gs = gs.measure_pauli(step.qubit, step.basis, k)?;
        for &q in &step.correct {
            gs = gs.apply_clifford(q, step.correction(k))?;
        }
    }
    Ok(gs)
}

/// Runs the pattern on the dense state for one outcome assignment.
pub fn run_on_statevector(
    psi: &PureState,
    pattern: &BellPattern,
    outcomes: &[u8],
) -> Result<(f64, PureState)> {
    let mut s = psi.clone();
    let mut prob = 1.0;
    for (step, &k) in pattern.steps.iter().zip(outcomes) {
        let (p, next) = s.project_measure(step.qubit, &step.basis.eigenprojector(k))?;
        prob *= p;
        s = next;
        let u = step.correction(k).matrix();
        for &q in &step.correct {
            s = s.apply_single(q, &u)?;
        }
    }
    Ok((prob, s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellVerification {
    pub branches: usize,
    pub min_entropy: f64,
    pub max_entropy: f64,
    /// Smallest fidelity of a branch's output with the edge graph state on `a`, `b`.
    pub min_fidelity: f64,
    /// Total probability of the branches (should be 1).
    pub total_probability: f64,
}

impl BellVerification {
    pub fn passed(&self, tol: f64) -> bool {
        (self.min_entropy - 1.0).abs() <= tol
            && (self.max_entropy - 1.0).abs() <= tol
            && self.min_fidelity >= 1.0 - tol
            && (self.total_probability - 1.0).abs() <= tol
    }
}

/// Executes every outcome branch on the state vector of `|G>`.
pub fn verify_bell_pattern(
    g: &Graph,
    pattern: &BellPattern,
    limit: usize,
) -> Result<BellVerification> {
    let psi = GraphState::new(g.clone()).to_statevector(limit)?;
    let m = pattern.steps.len();
    if m > 24 {
        return Err(Error::SizeLimit {
            what: "outcome branches (log2)",
            n: m,
            limit: 24,
        });
    }
    let target = GraphState::new(Graph::from_edges(2, &[(0, 1)])?.relabel(|v| {
        if v == 0 {
            pattern.a
        } else {
            pattern.b
        }
    })?)
    .to_statevector(limit)?;
    let results: Vec<(f64, f64, f64)> = (0..1usize << m)
        .into_par_iter()
        .map(|branch| {
            let outcomes: Vec<u8> = (0..m).map(|i| (branch >> i & 1) as u8).collect();
            let (p, out) = run_on_statevector(&psi, pattern, &outcomes)?;
            let out = out.reordered(&[pattern.a, pattern.b])?;
            let entropy = out.entropy(&Bipartition::new(&[pattern.a], out.labels())?)?;
            Ok((p, entropy, out.fidelity(&target)?))
        })
        .collect::<Result<_>>()?;
    let mut v = BellVerification {
        branches: results.len(),
        min_entropy: f64::INFINITY,
        max_entropy: f64::NEG_INFINITY,
        min_fidelity: f64::INFINITY,
        total_probability: 0.0,
    };
    for (p, e, f) in results {
        v.total_probability += p;
        v.min_entropy = v.min_entropy.min(e);
        v.max_entropy = v.max_entropy.max(e);
        v.min_fidelity = v.min_fidelity.min(f);
    }
    Ok(v)
}

/// Largest vertex set with pairwise deterministic Bell localization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NleReport {
    pub value: usize,
    /// The largest connected component (smallest labels first on ties).
    pub component: Vec<u32>,
    /// Pairs in `component` whose pattern was executed and checked on the graph level.
    pub certified_pairs: usize,
}

/// Size of the largest connected component. Every pair in it is certified by running
/// its Bell pattern through the graph rewrite rules with all-0 and all-1 outcomes and
/// checking that a bare edge remains.
pub fn n_le(g: &Graph) -> Result<NleReport> {
    let mut comps = g.components();
    comps.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    let Some(component) = comps.into_iter().next() else {
        return Ok(NleReport {
            value: 0,
            component: Vec::new(),
            certified_pairs: 0,
        });
    };
    let mut certified = 0;
    for (i, &a) in component.iter().enumerate() {
        for &b in &component[i + 1..] {
            let pattern = bell_localization_pattern(g, a, b)?;
            for outcomes in [vec![0; pattern.steps.len()], vec![1; pattern.steps.len()]] {
                let out = run_on_graph(g, &pattern, &outcomes)?;
                let edge = out.graph().n() == 2 && out.graph().has_edge(a, b)?;
                if !edge || !out.has_trivial_frame() {
                    return Err(Error::StructureCheck(format!(
                        "Bell pattern for ({a}, {b}) did not end in a bare edge"
                    )));
                }
            }
            certified += 1;
        }
    }
    Ok(NleReport {
        value: component.len(),
        component,
        certified_pairs: certified,
    })
}
