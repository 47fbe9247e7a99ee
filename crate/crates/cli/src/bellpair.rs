//! `bellpair`: a Pauli pattern leaving a Bell pair on two chosen vertices.

use std::path::Path;

use mqc_lab::graphstate::io::read_graph;
use mqc_lab::monotones::{
    bell_localization_pattern, run_on_graph, verify_bell_pattern, BellPattern, BellVerification,
};
use mqc_lab::{Graph, Pauli};
use serde::{Deserialize, Serialize};

use crate::{csv_table, Report, Status, UsageError};

/// Entropy and fidelity tolerance for the dense check.
pub const BELL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellpairReport {
    pub a: u32,
    pub b: u32,
    pub qubits: usize,
    pub connected: bool,
    /// Entanglement (ebits) that can be localized deterministically on `a`, `b`.
    pub e_bell: f64,
    /// `Y`/`Z` per measured qubit, in measurement order, e.g. `Z2 Y1`.
    pub pattern_text: Option<String>,
    pub pattern: Option<BellPattern>,
    /// All-0 and all-1 outcome runs through the graph rewrite rules end in a bare edge.
    pub graph_check: Option<bool>,
    /// Every outcome branch on the state vector, when within the size limit.
    pub statevec: Option<BellVerification>,
    pub statevec_skipped: Option<String>,
    /// Why no pattern exists.
    pub certificate: Option<String>,
    pub passed: bool,
}

fn pattern_text(p: &BellPattern) -> String {
    p.steps
        .iter()
        .map(|s| format!("{}{}", if s.basis == Pauli::Y { 'Y' } else { 'Z' }, s.qubit))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn bellpair_on_graph(
    g: &Graph,
    a: u32,
    b: u32,
    limit: usize,
) -> anyhow::Result<BellpairReport> {
    for v in [a, b] {
        if !g.contains(v) {
            anyhow::bail!(UsageError(format!("vertex {v} is not in the graph")));
        }
    }
    if a == b {
        anyhow::bail!(UsageError("a Bell pair needs two distinct vertices".into()));
    }
    let mut r = BellpairReport {
        a,
        b,
        qubits: g.n(),
        connected: false,
        e_bell: 0.0,
        pattern_text: None,
        pattern: None,
        graph_check: None,
        statevec: None,
        statevec_skipped: None,
        certificate: None,
        passed: false,
    };
    let pattern = match bell_localization_pattern(g, a, b) {
        Ok(p) => p,
        Err(mqc_lab::Error::NoPath(..)) => {
            let component = g
                .components()
                .into_iter()
                .find(|c| c.contains(&a))
                .unwrap_or_default();
            r.certificate = Some(format!(
                "{a} and {b} lie in different connected components ({a} is in {component:?}); \
                 the graph state is a product across components, so no LOCC protocol yields entanglement"
            ));
            r.passed = true;
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    r.connected = true;
    let mut ok = true;
    for k in [0u8, 1] {
        let out = run_on_graph(g, &pattern, &vec![k; pattern.steps.len()])?;
        ok &= out.graph().n() == 2 && out.graph().has_edge(a, b)? && out.has_trivial_frame();
    }
    r.graph_check = Some(ok);
    match verify_bell_pattern(g, &pattern, limit) {
        Ok(v) => {
            ok &= v.passed(BELL_TOL);
            r.statevec = Some(v);
        }
        Err(e @ mqc_lab::Error::SizeLimit { .. }) => r.statevec_skipped = Some(e.to_string()),
        Err(e) => return Err(e.into()),
    }
    r.e_bell = if ok { 1.0 } else { 0.0 };
    r.pattern_text = Some(pattern_text(&pattern));
    r.pattern = Some(pattern);
    r.passed = ok;
    Ok(r)
}

pub fn bellpair(path: &Path, a: u32, b: u32, limit: usize) -> anyhow::Result<BellpairReport> {
    bellpair_on_graph(&read_graph(path)?, a, b, limit)
}

#[derive(Serialize)]
struct Row<'a> {
    a: u32,
    b: u32,
    connected: bool,
    e_bell: f64,
    pattern: Option<&'a str>,
    graph_check: Option<bool>,
    branches: Option<usize>,
    min_entropy: Option<f64>,
    min_fidelity: Option<f64>,
    passed: bool,
}

impl Report for BellpairReport {
    fn status(&self) -> Status {
        match (self.connected, self.passed) {
            (false, _) => Status::CriterionViolation,
            (true, true) => Status::Ok,
            (true, false) => Status::StructuralFailure,
        }
    }

    fn csv(&self) -> anyhow::Result<String> {
        let v = self.statevec.as_ref();
        csv_table([Row {
            a: self.a,
            b: self.b,
            connected: self.connected,
            e_bell: self.e_bell,
            pattern: self.pattern_text.as_deref(),
            graph_check: self.graph_check,
            branches: v.map(|v| v.branches),
            min_entropy: v.map(|v| v.min_entropy),
            min_fidelity: v.map(|v| v.min_fidelity),
            passed: self.passed,
        }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_endpoints_use_two_y_measurements() {
        let r = bellpair_on_graph(&Graph::path(4), 0, 3, 22).unwrap();
        assert!(r.passed && r.connected);
        assert_eq!(r.pattern_text.as_deref(), Some("Y1 Y2"));
        assert_eq!(r.statevec.as_ref().unwrap().branches, 4);
        assert_eq!(r.e_bell, 1.0);
        assert_eq!(r.status(), Status::Ok);
    }

    #[test]
    fn disconnected_vertices_get_a_certificate() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let r = bellpair_on_graph(&g, 0, 5, 22).unwrap();
        assert!(!r.connected && r.pattern.is_none());
        assert_eq!(r.e_bell, 0.0);
        assert!(r
            .certificate
            .as_deref()
            .unwrap()
            .contains("different connected components"));
        assert_eq!(r.status(), Status::CriterionViolation);
    }

    #[test]
    fn large_graphs_skip_the_dense_check() {
        let r = bellpair_on_graph(&Graph::grid(3, 3), 0, 8, 5).unwrap();
        assert!(r.passed && r.statevec.is_none() && r.statevec_skipped.is_some());
    }

    #[test]
    fn bad_vertices_are_usage_errors() {
        assert!(bellpair_on_graph(&Graph::path(3), 0, 7, 22).is_err());
        assert!(bellpair_on_graph(&Graph::path(3), 1, 1, 22).is_err());
    }
}
