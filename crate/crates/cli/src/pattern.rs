//! `pattern-run`: execute a measurement pattern on a graph-state resource.

use std::path::Path;

use anyhow::Context;
use mqc_lab::graphstate::io::read_graph;
use mqc_lab::lattices::{execute_pattern, prepare_resource, MeasurementPattern, OutcomeSource};
use mqc_lab::{Graph, GraphState, PureState};
use serde::{Deserialize, Serialize};

use crate::{csv_table, Report, Status, UsageError};

/// Corrected outputs of all branches must agree to this fidelity.
pub const DETERMINISM_TOL: f64 = 1e-9;

/// Exhaustive runs are refused above this many measured qubits.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Input state on some of the graph's qubits; character `i` of a key is `labels[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub labels: Vec<u32>,
    pub amplitudes: Vec<(String, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    /// Outcome bits in step order.
    pub outcomes: String,
    pub probability: f64,
    /// `(qubit, x, z)` byproducts that were undone.
    pub byproduct: Vec<(u32, bool, bool)>,
    /// Fidelity of the corrected output with the first branch's.
    pub fidelity_to_first: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub outputs: Vec<u32>,
    pub exhaustive: bool,
    pub branches: Vec<BranchRow>,
    pub total_probability: f64,
    /// Corrected output of the first branch, keyed like the outputs.
    pub output_state: Vec<(String, f64, f64)>,
    pub deterministic: bool,
}

pub fn run_pattern(
    graph: &Graph,
    pattern: &MeasurementPattern,
    input: Option<&PureState>,
    source: &OutcomeSource,
    limit: usize,
) -> anyhow::Result<PatternReport> {
    pattern.validate()?;
    let exhaustive = matches!(source, OutcomeSource::Exhaustive);
    if exhaustive && pattern.steps.len() > EXHAUSTIVE_LIMIT {
        anyhow::bail!(UsageError(format!(
            "{} measured qubits exceed the exhaustive limit {EXHAUSTIVE_LIMIT}; use --runs",
            pattern.steps.len()
        )));
    }
    let resource = match input {
        Some(s) => prepare_resource(s, graph, limit)?,
        None => GraphState::new(graph.clone()).to_statevector(limit)?,
    };
    let branches = execute_pattern(&resource, pattern, source)?;
    let first = branches
        .first()
        .ok_or_else(|| UsageError("pattern produced no branch".into()))?
        .corrected
        .clone();
    let mut rows = Vec::with_capacity(branches.len());
    for b in &branches {
        rows.push(BranchRow {
            outcomes: b.outcomes.iter().map(|k| char::from(b'0' + k)).collect(),
            probability: b.probability,
            byproduct: b.byproduct.clone(),
            fidelity_to_first: b.corrected.fidelity(&first)?,
        });
    }
    Ok(PatternReport {
        outputs: pattern.outputs.clone(),
        exhaustive,
        total_probability: rows.iter().map(|r| r.probability).sum(),
        deterministic: rows
            .iter()
            .all(|r| r.fidelity_to_first >= 1.0 - DETERMINISM_TOL),
        output_state: first.to_bitstring_map(1e-12),
        branches: rows,
    })
}

pub fn load_pattern(path: &Path) -> anyhow::Result<MeasurementPattern> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("pattern file {}: {e}", path.display())))?)
}

pub fn load_input(path: &Path) -> anyhow::Result<PureState> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let f: InputFile = serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("input file {}: {e}", path.display())))?;
    Ok(PureState::from_bitstring_map(f.labels, &f.amplitudes)?)
}

pub fn pattern_run(
    pattern: &Path,
    graph: &Path,
    input: Option<&Path>,
    source: &OutcomeSource,
    limit: usize,
) -> anyhow::Result<PatternReport> {
    let p = load_pattern(pattern)?;
    let g = read_graph(graph)?;
    let input = input.map(load_input).transpose()?;
    run_pattern(&g, &p, input.as_ref(), source, limit)
}

impl Report for PatternReport {
    fn status(&self) -> Status {
        if self.deterministic {
            Status::Ok
        } else {
            Status::StructuralFailure
        }
    }

    fn csv(&self) -> anyhow::Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            outcomes: &'a str,
            probability: f64,
            fidelity_to_first: f64,
        }
        csv_table(self.branches.iter().map(|b| Row {
            outcomes: &b.outcomes,
            probability: b.probability,
            fidelity_to_first: b.fidelity_to_first,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mqc_lab::lattices::{Basis, Byproduct, Step};

    fn wire() -> MeasurementPattern {
        MeasurementPattern {
            steps: vec![Step::new(0, Basis::X), Step::new(1, Basis::X)],
            outputs: vec![2],
            byproducts: vec![Byproduct {
                qubit: 2,
                x_domain: vec![1],
                z_domain: vec![0],
                x_flip: false,
                z_flip: false,
            }],
        }
    }

    #[test]
    fn three_qubit_wire_is_deterministic() {
        let r = run_pattern(
            &Graph::path(3),
            &wire(),
            None,
            &OutcomeSource::Exhaustive,
            22,
        )
        .unwrap();
        assert_eq!(r.branches.len(), 4);
        assert!(r.deterministic && (r.total_probability - 1.0).abs() < 1e-12);
        // two X measurements teleport |+> through two Hadamards
        let out = PureState::from_bitstring_map(vec![2], &r.output_state).unwrap();
        assert!(out.fidelity(&PureState::plus(vec![2])).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn a_missing_byproduct_breaks_determinism() {
        let mut p = wire();
        p.byproducts.clear();
        let r = run_pattern(&Graph::path(3), &p, None, &OutcomeSource::Exhaustive, 22).unwrap();
        assert!(!r.deterministic);
        assert_eq!(r.status(), Status::StructuralFailure);
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (pp, gp, ip) = (
            dir.path().join("p.json"),
            dir.path().join("g.edges"),
            dir.path().join("in.json"),
        );
        std::fs::write(&pp, serde_json::to_string(&wire()).unwrap()).unwrap();
        std::fs::write(&gp, "3\n0 1\n1 2\n").unwrap();
        let input = InputFile {
            labels: vec![0],
            amplitudes: vec![("0".into(), 1.0, 0.0)],
        };
        std::fs::write(&ip, serde_json::to_string(&input).unwrap()).unwrap();
        let r = pattern_run(
            &pp,
            &gp,
            Some(&ip),
            &OutcomeSource::Sampled { seed: 1, runs: 5 },
            22,
        )
        .unwrap();
        assert!(r.deterministic && !r.exhaustive);
        assert_eq!(r.branches.len(), 5);
        // |0> through two Hadamards is |0>
        let out = PureState::from_bitstring_map(vec![2], &r.output_state).unwrap();
        assert!(out.fidelity(&PureState::zero(vec![2])).unwrap() > 1.0 - 1e-12);
    }
}
