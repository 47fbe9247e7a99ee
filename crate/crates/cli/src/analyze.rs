//! `analyze`: measures across a family's sizes, fit classes and verdicts.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::family::{FamilyKind, FamilySpec};
use crate::measures::{evaluate, normalize_measures, Evaluation, Limits, Measure};
use crate::scaling::{verdict, ScalingVerdict, SizeValue, Verdict};
use crate::{csv_table, Report, Status};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub family: FamilySpec,
    pub limits: Limits,
    pub measures: Vec<Measure>,
    /// Ordered by size, then measure name.
    pub rows: Vec<Evaluation>,
    pub verdicts: Vec<ScalingVerdict>,
    /// Strongest verdict over all measures.
    pub overall: Verdict,
    pub overall_text: String,
}

pub fn analyze(
    family: &FamilySpec,
    measures: &[Measure],
    limits: &Limits,
) -> anyhow::Result<AnalyzeReport> {
    let measures = normalize_measures(measures.to_vec());
    let instances = family
        .sizes
        .iter()
        .map(|&s| family.instance(s))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let jobs: Vec<(usize, Measure)> = (0..instances.len())
        .flat_map(|i| measures.iter().map(move |&m| (i, m)))
        .collect();
    let rows: Vec<Evaluation> = jobs
        .par_iter()
        .map(|&(i, m)| evaluate(&instances[i], m, limits))
        .collect();
    let verdicts: Vec<ScalingVerdict> = measures
        .iter()
        .map(|&m| {
            let values = rows
                .iter()
                .filter(|r| r.measure == m)
                .filter_map(|r| {
                    r.value.map(|value| SizeValue {
                        size: r.size,
                        qubits: r.qubits,
                        value,
                    })
                })
                .collect();
            verdict(family.kind, m, values)
        })
        .collect();
    let overall = verdicts
        .iter()
        .map(|v| v.verdict)
        .max()
        .unwrap_or(Verdict::ConsistentWithUniversality);
    Ok(AnalyzeReport {
        family: family.clone(),
        limits: limits.clone(),
        measures,
        rows,
        verdicts,
        overall,
        overall_text: overall.to_string(),
    })
}

impl AnalyzeReport {
    /// Plain `x y` columns per measure, separated by blank lines (gnuplot `index` blocks).
    pub fn plot_data(&self) -> String {
        let mut s = String::new();
        for v in &self.verdicts {
            let _ = writeln!(s, "# {} {}", self.family.kind.name(), v.measure.name());
            for p in &v.values {
                let _ = writeln!(s, "{} {}", p.qubits, p.value);
            }
            s.push_str("\n\n");
        }
        s
    }
}

#[derive(Serialize)]
struct Row<'a> {
    family: &'static str,
    size: usize,
    qubits: usize,
    measure: &'static str,
    value: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    exact: bool,
    method: Option<&'a str>,
    skipped: Option<&'a str>,
}

impl Report for AnalyzeReport {
    fn status(&self) -> Status {
        match self.overall {
            Verdict::ConsistentWithUniversality => Status::Ok,
            _ => Status::CriterionViolation,
        }
    }

    fn csv(&self) -> anyhow::Result<String> {
        let family = self.family.kind.name();
        csv_table(self.rows.iter().map(|r| Row {
            family,
            size: r.size,
            qubits: r.qubits,
            measure: r.measure.name(),
            value: r.value,
            lower: r.lower,
            upper: r.upper,
            exact: r.exact,
            method: r.method.as_deref(),
            skipped: r.skipped.as_deref(),
        }))
    }
}

/// The measures a family supports by default.
pub fn default_measures(kind: FamilyKind) -> Vec<Measure> {
    match kind {
        FamilyKind::W => vec![
            Measure::EntanglementWidth,
            Measure::GeometricMeasure,
            Measure::SchmidtRankWidth,
        ],
        _ => vec![Measure::RankWidth],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(kind: FamilyKind, sizes: Vec<usize>, m: &[Measure]) -> AnalyzeReport {
        analyze(
            &FamilySpec::new(kind, Some(sizes), 0, None).unwrap(),
            m,
            &Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn ghz_rank_width_fails_universality() {
        let r = run(FamilyKind::Ghz, (3..=9).collect(), &[Measure::RankWidth]);
        assert!(r.rows.iter().all(|e| e.value == Some(1.0) && e.exact));
        assert_eq!(r.overall, Verdict::FailsUniversality);
        assert_eq!(r.status(), Status::CriterionViolation);
    }

    #[test]
    fn grid_rank_width_is_consistent() {
        let r = run(FamilyKind::Grid, vec![2, 3, 4], &[Measure::RankWidth]);
        let v: Vec<f64> = r.rows.iter().map(|e| e.value.unwrap()).collect();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.overall, Verdict::ConsistentWithUniversality);
    }

    #[test]
    fn rows_are_ordered_and_size_limits_are_not_fatal() {
        let limits = Limits {
            statevec_limit: 4,
            ..Limits::default()
        };
        let spec = FamilySpec::new(FamilyKind::LinearCluster, Some(vec![3, 5]), 0, None).unwrap();
        let r = analyze(
            &spec,
            &[Measure::RankWidth, Measure::EntanglementWidth],
            &limits,
        )
        .unwrap();
        let order: Vec<(usize, &str)> = r.rows.iter().map(|e| (e.size, e.measure.name())).collect();
        assert_eq!(
            order,
            vec![
                (3, "entanglement_width"),
                (3, "rank_width"),
                (5, "entanglement_width"),
                (5, "rank_width")
            ]
        );
        assert!(r.rows[2].skipped.is_some() && r.rows[2].value.is_none());
        assert_eq!(r.rows[3].value, Some(1.0));
    }

    #[test]
    fn w_is_not_a_graph_state() {
        let r = run(FamilyKind::W, vec![3], &[Measure::RankWidth]);
        assert!(r.rows[0]
            .skipped
            .as_deref()
            .unwrap()
            .contains("not a graph state"));
    }

    #[test]
    fn plot_data_columns() {
        let r = run(FamilyKind::LinearCluster, vec![2, 3], &[Measure::RankWidth]);
        assert_eq!(r.plot_data(), "# linear_cluster rank_width\n2 1\n3 1\n\n\n");
    }
}
