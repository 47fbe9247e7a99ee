//! Evaluation of one entanglement measure on one family member.

use clap::ValueEnum;
use mqc_lab::monotones::{
    geometric_measure, n_le, schmidt_measure_bounds, GeometricOptions, SchmidtOptions,
};
use mqc_lab::widths::{
    entanglement_width, rank_width, schmidt_rank_width, Strategy, WidthOptions, DEFAULT_EXACT_LIMIT,
};
use serde::{Deserialize, Serialize};

use crate::family::Instance;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum,
)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Measure {
    /// Rank-width of the graph (GF(2) cut-rank).
    RankWidth,
    /// Entropic entanglement width of the state vector.
    EntanglementWidth,
    /// Schmidt-rank width (log2 Schmidt rank) of the state vector.
    SchmidtRankWidth,
    /// Geometric measure, best value over seeded restarts.
    GeometricMeasure,
    /// Schmidt-measure bounds; the value is set only when they meet.
    SchmidtMeasure,
    /// Localizable-entanglement vertex count.
    NLe,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::EntanglementWidth,
        Measure::GeometricMeasure,
        Measure::NLe,
        Measure::RankWidth,
        Measure::SchmidtMeasure,
        Measure::SchmidtRankWidth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::RankWidth => "rank_width",
            Measure::EntanglementWidth => "entanglement_width",
            Measure::SchmidtRankWidth => "schmidt_rank_width",
            Measure::GeometricMeasure => "geometric_measure",
            Measure::SchmidtMeasure => "schmidt_measure",
            Measure::NLe => "n_le",
        }
    }
}

/// Sorts by name and drops duplicates, the order reports use.
pub fn normalize_measures(mut m: Vec<Measure>) -> Vec<Measure> {
    m.sort_by_key(|x| x.name());
    m.dedup();
    m
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub statevec_limit: usize,
    /// Largest party count for the exact width optimizer.
    pub exact_limit: usize,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            statevec_limit: mqc_lab::DEFAULT_STATEVEC_LIMIT,
            exact_limit: DEFAULT_EXACT_LIMIT,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub size: usize,
    pub qubits: usize,
    pub measure: Measure,
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// `value` is the exact minimum (widths) or the bounds meet (Schmidt measure).
    pub exact: bool,
    pub method: Option<String>,
    /// Why no value was produced (size limits, not a graph state).
    pub skipped: Option<String>,
}

impl Evaluation {
    fn empty(inst: &Instance, measure: Measure) -> Self {
        Self {
            size: inst.size,
            qubits: inst.qubits,
            measure,
            value: None,
            lower: None,
            upper: None,
            exact: false,
            method: None,
            skipped: None,
        }
    }
}

fn method_name(m: mqc_lab::widths::Method) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn evaluate(inst: &Instance, measure: Measure, limits: &Limits) -> Evaluation {
    let mut e = Evaluation::empty(inst, measure);
    if let Err(err) = fill(&mut e, inst, measure, limits) {
        e.skipped = Some(err.to_string());
    }
    e
}

fn fill(
    e: &mut Evaluation,
    inst: &Instance,
    measure: Measure,
    limits: &Limits,
) -> mqc_lab::Result<()> {
    let widths = WidthOptions {
        strategy: Strategy::Auto,
        exact_limit: limits.exact_limit,
    };
    let not_graph =
        || mqc_lab::Error::InvalidOperator("graph measure on a state that is not a graph state");
    match measure {
        Measure::RankWidth => {
            let g = inst.graph.as_ref().ok_or_else(not_graph)?;
            let r = rank_width(g, &widths)?;
            set_width(e, r.value, r.exact);
            e.method = Some(method_name(r.method));
        }
        Measure::EntanglementWidth | Measure::SchmidtRankWidth => {
            let s = inst.state(limits.statevec_limit)?;
            let r = if measure == Measure::EntanglementWidth {
                entanglement_width(&s, &widths)?
            } else {
                schmidt_rank_width(&s, &widths)?
            };
            set_width(e, r.value, r.exact);
            e.method = Some(method_name(r.method));
        }
        Measure::GeometricMeasure => {
            let s = inst.state(limits.statevec_limit)?;
            let r = geometric_measure(
                &s,
                &GeometricOptions {
                    seed: limits.seed,
                    ..GeometricOptions::default()
                },
            )?;
            // the optimizer finds a lower bound on the overlap, hence an upper bound here
            e.value = Some(r.value);
            e.upper = Some(r.value);
            e.exact = false;
            e.method = Some("see_saw".into());
        }
        Measure::SchmidtMeasure => {
            let s = inst.state(limits.statevec_limit)?;
            let b = schmidt_measure_bounds(
                &s,
                &SchmidtOptions {
                    seed: limits.seed,
                    ..SchmidtOptions::default()
                },
            )?;
            e.lower = Some(b.lower);
            e.upper = b.upper;
            e.exact = b.exact;
            e.value = if b.exact { b.upper } else { None };
            e.method = Some("rank_fit".into());
        }
        Measure::NLe => {
            let g = inst.graph.as_ref().ok_or_else(not_graph)?;
            let r = n_le(g)?;
            e.value = Some(r.value as f64);
            e.exact = true;
            e.method = Some("component".into());
        }
    }
    Ok(())
}

fn set_width(e: &mut Evaluation, value: f64, exact: bool) {
    e.value = Some(value);
    e.upper = Some(value);
    e.exact = exact;
    if exact {
        e.lower = Some(value);
    }
}
