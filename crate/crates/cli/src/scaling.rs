//! Scaling classification of measure values and the verdicts drawn from it.
//!
//! Finite size ranges cannot certify asymptotic behaviour, so a fit alone never produces
//! a negative verdict. A measure fails a criterion only when the family has a
//! registered closed-form bound and every computed value agrees with it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::family::FamilyKind;
use crate::measures::Measure;

/// Values must match a witness to this tolerance.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitClass {
    Bounded,
    Logarithmic,
    Polynomial,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    /// `constant` (c), `logarithmic` (a + b ln n) or `power` (a n^b).
    pub model: String,
    pub params: Vec<f64>,
    pub rss: f64,
    /// Bayesian information criterion; smaller is better.
    pub bic: f64,
}

fn bic(points: usize, rss: f64, k: usize) -> f64 {
    let m = points as f64;
    // floor the residual so exact fits compare by parameter count
    m * (rss / m).max(1e-24).ln() + k as f64 * m.ln()
}

fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx < 1e-300 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Least-squares fits of the three models to `(n, value)` points.
pub fn fit_models(points: &[(f64, f64)]) -> Vec<ModelFit> {
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let m = points.len();
    let rss = |f: &dyn Fn(f64) -> f64| -> f64 {
        x.iter().zip(&y).map(|(&a, &b)| (f(a) - b).powi(2)).sum()
    };
    let mut fits = Vec::new();
    let c = y.iter().sum::<f64>() / m as f64;
    let r = rss(&|_| c);
    fits.push(ModelFit {
        model: "constant".into(),
        params: vec![c],
        rss: r,
        bic: bic(m, r, 1),
    });
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    if let Some((a, b)) = linear_fit(&lx, &y) {
        let r = rss(&|n| a + b * n.ln());
        fits.push(ModelFit {
            model: "logarithmic".into(),
            params: vec![a, b],
            rss: r,
            bic: bic(m, r, 2),
        });
    }
    if y.iter().all(|&v| v > 0.0) {
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        if let Some((la, b)) = linear_fit(&lx, &ly) {
            let a = la.exp();
            let r = rss(&|n| a * n.powf(b));
            fits.push(ModelFit {
                model: "power".into(),
                params: vec![a, b],
                rss: r,
                bic: bic(m, r, 2),
            });
        }
    }
    fits
}

/// Model selection: at least three points; identical values are bounded; otherwise the
/// smallest BIC wins, ties going to the model listed first (constant, log, power).
pub fn classify(points: &[(f64, f64)]) -> (FitClass, Vec<ModelFit>) {
    if points.len() < 3 {
        return (FitClass::Inconclusive, fit_models(points));
    }
    let fits = fit_models(points);
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| {
            (l.min(p.1), h.max(p.1))
        });
    if hi - lo <= 1e-9 * hi.abs().max(1.0) {
        return (FitClass::Bounded, fits);
    }
    let best = fits
        .iter()
        .fold(&fits[0], |b, f| if f.bic < b.bic - 1e-9 { f } else { b });
    let class = match best.model.as_str() {
        "constant" => FitClass::Bounded,
        "logarithmic" => FitClass::Logarithmic,
        _ if best.params[1] <= 0.0 => FitClass::Bounded,
        _ => FitClass::Polynomial,
    };
    (class, fits)
}

/// Ordered from weakest to strongest negative finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithUniversality,
    FailsEfficiency,
    FailsUniversality,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ConsistentWithUniversality => "consistent with universality",
            Verdict::FailsEfficiency => "fails efficiency criterion",
            Verdict::FailsUniversality => "fails universality criterion",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessGrowth {
    /// The measure is bounded by a constant on the whole family.
    Bounded,
    /// The measure grows at most logarithmically in the qubit count.
    Logarithmic,
}

/// Closed-form statement about a measure on a family.
#[derive(Clone, Copy, Debug)]
pub struct Witness {
    pub family: FamilyKind,
    pub measure: Measure,
    pub growth: WitnessGrowth,
    pub statement: &'static str,
    /// Upper bound on the measure at size `n`.
    pub bound: fn(usize) -> f64,
    /// Exact value at size `n`, when known.
    pub exact: Option<fn(usize) -> f64>,
}

fn one(_: usize) -> f64 {
    1.0
}

fn two(_: usize) -> f64 {
    2.0
}

fn w_geometric(n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) * (n / (n - 1.0)).log2()
}

fn inv_ln2(_: usize) -> f64 {
    std::f64::consts::LOG2_E
}

const GHZ_CUTS: &str = "every bipartition of a GHZ state has Schmidt rank 2 (cut-rank 1)";
const PATH_CUTS: &str = "the path graph has cut-rank 1 along its linear order";
const TREE_CUTS: &str = "trees are distance-hereditary, so their rank-width is at most 1";
const CYCLE_CUTS: &str = "a cycle has cut-rank at most 2 along its cyclic order";

/// The analytic witnesses known to the classifier.
pub fn witnesses() -> Vec<Witness> {
    use FamilyKind::*;
    use Measure::*;
    let b = WitnessGrowth::Bounded;
    let mut out = Vec::new();
    for m in [RankWidth, EntanglementWidth, SchmidtRankWidth] {
        out.push(Witness {
            family: Ghz,
            measure: m,
            growth: b,
            statement: GHZ_CUTS,
            bound: one,
            exact: Some(one),
        });
        out.push(Witness {
            family: LinearCluster,
            measure: m,
            growth: b,
            statement: PATH_CUTS,
            bound: one,
            exact: None,
        });
        out.push(Witness {
            family: Tree,
            measure: m,
            growth: b,
            statement: TREE_CUTS,
            bound: one,
            exact: None,
        });
        out.push(Witness {
            family: Ring,
            measure: m,
            growth: b,
            statement: CYCLE_CUTS,
            bound: two,
            exact: None,
        });
    }
    out.push(Witness {
        family: Ghz,
        measure: GeometricMeasure,
        growth: b,
        statement: "the GHZ state has maximal product overlap 1/2",
        bound: one,
        exact: Some(one),
    });
    out.push(Witness {
        family: Ghz,
        measure: SchmidtMeasure,
        growth: b,
        statement: "the GHZ state is a sum of two product terms and has a rank-2 cut",
        bound: one,
        exact: Some(one),
    });
    out.push(Witness {
        family: W,
        measure: GeometricMeasure,
        growth: b,
        statement: "E_g(W_N) = (N-1) log2(N/(N-1)), increasing to 1/ln 2",
        bound: inv_ln2,
        exact: Some(w_geometric),
    });
    for m in [EntanglementWidth, SchmidtRankWidth] {
        out.push(Witness {
            family: W,
            measure: m,
            growth: b,
            statement: "every bipartition of a W state has Schmidt rank 2",
            bound: one,
            exact: None,
        });
    }
    out
}

pub fn witness_for(family: FamilyKind, measure: Measure) -> Option<Witness> {
    witnesses()
        .into_iter()
        .find(|w| w.family == family && w.measure == measure)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub statement: String,
    pub growth: WitnessGrowth,
    /// Every computed value respects the bound (and the exact value, when known).
    pub confirmed: bool,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeValue {
    pub size: usize,
    pub qubits: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingVerdict {
    pub measure: Measure,
    pub values: Vec<SizeValue>,
    pub fit_class: FitClass,
    pub fits: Vec<ModelFit>,
    pub witness: Option<WitnessCheck>,
    pub verdict: Verdict,
    pub criterion: String,
}

fn criterion_name(m: Measure, growth: WitnessGrowth) -> String {
    let what = match m {
        Measure::RankWidth => "rank-width",
        Measure::EntanglementWidth => "entanglement width",
        Measure::SchmidtRankWidth => "Schmidt-rank width",
        Measure::GeometricMeasure => "geometric measure",
        Measure::SchmidtMeasure => "Schmidt measure",
        Measure::NLe => "localizable-entanglement count",
    };
    match growth {
        WitnessGrowth::Bounded => format!("bounded {what}"),
        WitnessGrowth::Logarithmic => format!("{what} at most logarithmic in the qubit count"),
    }
}

/// Fits the values (against qubit count) and applies the witness rule.
pub fn verdict(family: FamilyKind, measure: Measure, values: Vec<SizeValue>) -> ScalingVerdict {
    let points: Vec<(f64, f64)> = values.iter().map(|v| (v.qubits as f64, v.value)).collect();
    let (fit_class, fits) = classify(&points);
    let witness = witness_for(family, measure)
        .filter(|_| !values.is_empty())
        .map(|w| {
            let mut dev = 0.0f64;
            let mut ok = true;
            for v in &values {
                let over = v.value - (w.bound)(v.qubits);
                ok &= over <= WITNESS_TOL;
                dev = dev.max(over.max(0.0));
                if let Some(exact) = w.exact {
                    let d = (v.value - exact(v.qubits)).abs();
                    ok &= d <= WITNESS_TOL;
                    dev = dev.max(d);
                }
            }
            (
                w,
                WitnessCheck {
                    statement: w.statement.into(),
                    growth: w.growth,
                    confirmed: ok,
                    max_deviation: dev,
                },
            )
        });
    let (verdict, criterion) = match &witness {
        Some((w, c)) if c.confirmed => match w.growth {
            WitnessGrowth::Bounded => (
                Verdict::FailsUniversality,
                criterion_name(measure, w.growth),
            ),
            WitnessGrowth::Logarithmic => {
                (Verdict::FailsEfficiency, criterion_name(measure, w.growth))
            }
        },
        _ => {
            let note = match fit_class {
                FitClass::Bounded | FitClass::Logarithmic => {
                    "slow growth on the tested range, no analytic witness"
                }
                FitClass::Polynomial => "polynomial growth on the tested range",
                FitClass::Inconclusive => "too few values to classify",
            };
            (Verdict::ConsistentWithUniversality, note.to_string())
        }
    };
    ScalingVerdict {
        measure,
        values,
        fit_class,
        fits,
        witness: witness.map(|(_, c)| c),
        verdict,
        criterion,
    }
}
