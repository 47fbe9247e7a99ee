//! `transform`: Pauli measurements and local complementations on a graph state.
//!
//! The graph-level result is checked against a dense simulation when the graph is
//! small enough: every frame-conjugated correlation operator of the final graph state
//! must have expectation `+1` (with its sign) on the projected state vector.

use std::path::Path;

use anyhow::bail;
use mqc_lab::graphstate::io::format_edge_list;
use mqc_lab::{Clifford, Graph, GraphState, Pauli, PureState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{csv_table, Report, Status, UsageError};

/// Stabilizer expectations must be within this of `+-1`.
pub const STABILIZER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Measure {
        qubit: u32,
        basis: Pauli,
        outcome: u8,
    },
    LocalComplement {
        qubit: u32,
    },
}

/// Parses tokens such as `Y3`, `Z5=1` and `LC2`, separated by commas or spaces.
pub fn parse_ops(text: &str) -> anyhow::Result<Vec<Op>> {
    let mut ops = Vec::new();
    for tok in text
        .split([',', ' '])
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        let bad = || {
            UsageError(format!(
                "bad operation {tok:?} (expected e.g. Y3, Z5=1, LC2)"
            ))
        };
        let upper = tok.to_ascii_uppercase();
        if let Some(rest) = upper.strip_prefix("LC") {
            ops.push(Op::LocalComplement {
                qubit: rest.parse().map_err(|_| bad())?,
            });
            continue;
        }
        let mut chars = upper.chars();
        let basis = chars
            .next()
            .and_then(Pauli::from_symbol)
            .filter(|&p| p != Pauli::I)
            .ok_or_else(bad)?;
        let rest = chars.as_str();
        let (q, k) = rest.split_once('=').unwrap_or((rest, "0"));
        let outcome = match k {
            "0" => 0,
            "1" => 1,
            _ => bail!(bad()),
        };
        ops.push(Op::Measure {
            qubit: q.parse().map_err(|_| bad())?,
            basis,
            outcome,
        });
    }
    if ops.is_empty() {
        bail!(UsageError("no operations given".into()));
    }
    Ok(ops)
}

/// `e^{-i pi/4 X}` on `v` and `e^{i pi/4 Z}` on its neighbours map `|G>` to `|G * v>`;
/// the frame absorbs the inverse so the state is unchanged.
pub fn local_complement(gs: &GraphState, v: u32) -> mqc_lab::Result<GraphState> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (c, i) = (Complex64::new(r, 0.0), Complex64::new(0.0, r));
    let z = Complex64::new(0.0, 0.0);
    let sqrt_x = Clifford::from_matrix(&[[c, -i], [-i, c]]).expect("Clifford");
    let sqrt_z = Clifford::from_matrix(&[[c + i, z], [z, c - i]]).expect("Clifford");
    let g = gs.graph();
    let neighbors = g.neighbors(v)?;
    let mut frame = gs.frame().to_vec();
    frame[g.position(v)?] = frame[g.position(v)?] * sqrt_x.inverse();
    for b in neighbors {
        let p = g.position(b)?;
        frame[p] = frame[p] * sqrt_z.inverse();
    }
    GraphState::with_frame(g.local_complement(v)?, frame)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpRecord {
    #[serde(flatten)]
    pub op: Op,
    /// Probability of the chosen outcome on the state vector, when simulated.
    pub probability: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub qubit: u32,
    /// Index into the 24-element local Clifford group.
    pub clifford: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub ops: Vec<OpRecord>,
    pub labels: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    /// Non-identity frame entries.
    pub frame: Vec<FrameEntry>,
    pub statevec_checked: bool,
    pub max_stabilizer_deviation: Option<f64>,
    pub passed: bool,
}

pub fn transform(
    g: &Graph,
    ops: &[Op],
    limit: usize,
) -> anyhow::Result<(TransformReport, GraphState)> {
    let mut gs = GraphState::new(g.clone());
    let mut dense: Option<PureState> = (g.n() <= limit)
        .then(|| gs.to_statevector(limit))
        .transpose()?;
    let mut records = Vec::new();
    for &op in ops {
        let mut probability = None;
        match op {
            Op::Measure {
                qubit,
                basis,
                outcome,
            } => {
                gs = gs.measure_pauli(qubit, basis, outcome)?;
                if let Some(s) = dense.take() {
                    let (p, post) = s.project_measure(qubit, &basis.eigenprojector(outcome))?;
                    probability = Some(p);
                    dense = Some(post);
                }
            }
            Op::LocalComplement { qubit } => gs = local_complement(&gs, qubit)?,
        }
        records.push(OpRecord { op, probability });
    }
    let deviation = match &dense {
        Some(s) => {
            let labels = gs.graph().labels().to_vec();
            let mut dev = 0.0f64;
            for (neg, paulis) in gs.stabilizers() {
                let ops: Vec<(u32, Pauli)> = labels.iter().copied().zip(paulis).collect();
                let want = if neg { -1.0 } else { 1.0 };
                dev = dev.max((s.pauli_expectation(&ops)? - want).norm());
            }
            Some(dev)
        }
        None => None,
    };
    let frame = gs
        .graph()
        .labels()
        .iter()
        .zip(gs.frame())
        .filter(|(_, c)| !c.is_identity())
        .map(|(&qubit, c)| FrameEntry {
            qubit,
            clifford: c.index(),
        })
        .collect();
    let report = TransformReport {
        ops: records,
        labels: gs.graph().labels().to_vec(),
        edges: gs.graph().edges(),
        frame,
        statevec_checked: deviation.is_some(),
        max_stabilizer_deviation: deviation,
        passed: deviation.is_none_or(|d| d <= STABILIZER_TOL),
    };
    Ok((report, gs))
}

/// Writes the graph in edge-list form with labels renumbered `0..n` in sorted order.
pub fn write_graph(g: &Graph, path: &Path) -> anyhow::Result<()> {
    let mut labels = g.labels().to_vec();
    labels.sort_unstable();
    let index = |l: u32| labels.binary_search(&l).expect("label present") as u32;
    let edges: Vec<(u32, u32)> = g
        .edges()
        .into_iter()
        .map(|(u, v)| (index(u), index(v)))
        .collect();
    let sorted = Graph::from_edges(labels.len(), &edges)?;
    std::fs::write(path, format_edge_list(&sorted)?)?;
    Ok(())
}

impl Report for TransformReport {
    fn status(&self) -> Status {
        if self.passed {
            Status::Ok
        } else {
            Status::StructuralFailure
        }
    }

    fn csv(&self) -> anyhow::Result<String> {
        #[derive(Serialize)]
        struct Edge {
            u: u32,
            v: u32,
        }
        csv_table(self.edges.iter().map(|&(u, v)| Edge { u, v }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_operations() {
        let ops = parse_ops("Y3, z5=1 LC2").unwrap();
        assert_eq!(
            ops,
            vec![
                Op::Measure {
                    qubit: 3,
                    basis: Pauli::Y,
                    outcome: 0
                },
                Op::Measure {
                    qubit: 5,
                    basis: Pauli::Z,
                    outcome: 1
                },
                Op::LocalComplement { qubit: 2 },
            ]
        );
        for bad in ["", "Q3", "Y", "Z3=2", "LCx"] {
            assert!(parse_ops(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn local_complement_keeps_the_state() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let gs = GraphState::new(g.clone());
        for v in 0..5 {
            let lc = local_complement(&gs, v).unwrap();
            assert!(lc
                .graph()
                .same_labelled_graph(&g.local_complement(v).unwrap()));
            let a = gs.to_statevector(22).unwrap();
            let b = lc.to_statevector(22).unwrap();
            assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-12, "vertex {v}");
        }
    }

    #[test]
    fn measurements_match_the_dense_projection() {
        let ops = parse_ops("Y1=1, LC3, Z4=1, Y2").unwrap();
        let (r, gs) = transform(&Graph::cycle(6), &ops, 22).unwrap();
        assert!(r.statevec_checked && r.passed, "{r:?}");
        assert_eq!(gs.n(), 3);
        assert!(r
            .ops
            .iter()
            .filter(|o| matches!(o.op, Op::Measure { .. }))
            .all(|o| (o.probability.unwrap() - 0.5).abs() < 1e-12));
    }

    #[test]
    fn x_measurements_are_rejected() {
        assert!(transform(&Graph::path(3), &parse_ops("X1").unwrap(), 22).is_err());
    }

    #[test]
    fn written_graphs_are_renumbered() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        let (_, gs) = transform(&Graph::path(4), &parse_ops("Z0").unwrap(), 22).unwrap();
        write_graph(gs.graph(), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "3\n0 1\n1 2\n");
    }
}
