//! Adaptive one-qubit measurement patterns executed on dense states.
//!
//! A step measures one qubit in a basis given by Bloch angles `(theta, phi)`; outcome
//! `0` projects onto `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`, outcome `1` onto
//! the orthogonal vector. The basis adapts to earlier outcomes: an odd parity of the
//! `s_domain` conjugates it by `X` (`(theta, phi) -> (pi - theta, -phi)`), an odd
//! parity of the `t_domain` by `Z` (`phi -> phi + pi`).
//!
//! After the last step the output qubits hold `X^x Z^z` times the intended state on
//! each output, with `x`, `z` the parities of the byproduct domains (plus a constant
//! flip). Correcting applies `Z^z X^x`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::{Graph, Pauli};
use crate::statevec::{PureState, IMPOSSIBLE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Basis {
    X,
    Y,
    Z,
    /// Equatorial basis `(|0> ± e^{i alpha}|1>) / sqrt 2`.
    Plane {
        alpha: f64,
    },
    Bloch {
        theta: f64,
        phi: f64,
    },
}

impl Basis {
    /// Bloch angles `(theta, phi)` of the outcome-0 vector.
    pub fn angles(self) -> (f64, f64) {
        match self {
            Basis::X => (FRAC_PI_2, 0.0),
            Basis::Y => (FRAC_PI_2, FRAC_PI_2),
            Basis::Z => (0.0, 0.0),
            Basis::Plane { alpha } => (FRAC_PI_2, alpha),
            Basis::Bloch { theta, phi } => (theta, phi),
        }
    }

    /// Angles after conjugation by `X` (if `s`) and `Z` (if `t`).
    pub fn adapted(self, s: bool, t: bool) -> (f64, f64) {
        let (mut theta, mut phi) = self.angles();
        if s {
            theta = PI - theta;
            phi = -phi;
        }
        if t {
            phi += PI;
        }
        (theta, phi)
    }

    pub fn pauli(p: Pauli) -> Option<Basis> {
        match p {
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
            Pauli::I => None,
        }
    }
}

/// Normalized eigenvector for outcome `k` of the basis with Bloch angles `(theta, phi)`.
pub fn basis_vector(theta: f64, phi: f64, k: u8) -> [Complex64; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    if k == 0 {
        [Complex64::new(c, 0.0), e * s]
    } else {
        [Complex64::new(s, 0.0), -e * c]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub qubit: u32,
    pub basis: Basis,
    /// Earlier measured qubits whose outcome parity flips the basis by `X`.
    #[serde(default)]
    pub s_domain: Vec<u32>,
    /// Earlier measured qubits whose outcome parity flips the basis by `Z`.
    #[serde(default)]
    pub t_domain: Vec<u32>,
}

impl Step {
    pub fn new(qubit: u32, basis: Basis) -> Self {
        Self {
            qubit,
            basis,
            s_domain: Vec::new(),
            t_domain: Vec::new(),
        }
    }

    pub fn with_s(mut self, s: &[u32]) -> Self {
        self.s_domain = s.to_vec();
        self
    }

    pub fn with_t(mut self, t: &[u32]) -> Self {
        self.t_domain = t.to_vec();
        self
    }
}

/// Pauli byproduct `X^x Z^z` left on one output qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Byproduct {
    pub qubit: u32,
    #[serde(default)]
    pub x_domain: Vec<u32>,
    #[serde(default)]
    pub z_domain: Vec<u32>,
    #[serde(default)]
    pub x_flip: bool,
    #[serde(default)]
    pub z_flip: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPattern {
    pub steps: Vec<Step>,
    pub outputs: Vec<u32>,
    #[serde(default)]
    pub byproducts: Vec<Byproduct>,
}

impl MeasurementPattern {
    /// Each qubit is measured at most once, domains only refer to earlier steps,
    /// outputs are never measured and byproducts sit on outputs.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPattern(m));
        let mut seen = HashSet::new();
        for (i, step) in self.steps.iter().enumerate() {
            for &d in step.s_domain.iter().chain(&step.t_domain) {
                if !seen.contains(&d) {
                    return bad(format!(
                        "step {i} (qubit {}) depends on qubit {d}, which is not measured before it",
                        step.qubit
                    ));
                }
            }
            if !seen.insert(step.qubit) {
                return bad(format!("qubit {} is measured twice", step.qubit));
            }
        }
        let mut outs = HashSet::new();
        for &o in &self.outputs {
            if seen.contains(&o) {
                return bad(format!("output qubit {o} is also measured"));
            }
            if !outs.insert(o) {
                return bad(format!("output qubit {o} listed twice"));
            }
        }
        let mut corrected = HashSet::new();
        for b in &self.byproducts {
            if !outs.contains(&b.qubit) {
                return bad(format!(
                    "byproduct on qubit {}, which is not an output",
                    b.qubit
                ));
            }
            if !corrected.insert(b.qubit) {
                return bad(format!("two byproduct entries for qubit {}", b.qubit));
            }
            if let Some(d) = b
                .x_domain
                .iter()
                .chain(&b.z_domain)
                .find(|d| !seen.contains(d))
            {
                return bad(format!(
                    "byproduct on qubit {} depends on unmeasured qubit {d}",
                    b.qubit
                ));
            }
        }
        Ok(())
    }

    pub fn measured(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.qubit).collect()
    }

    /// `(qubit, x, z)` for each byproduct entry, given outcomes in step order.
    pub fn byproduct(&self, outcomes: &[u8]) -> Vec<(u32, bool, bool)> {
        let lookup = self.outcome_lookup(outcomes);
        self.byproducts
            .iter()
            .map(|b| {
                (
                    b.qubit,
                    parity(&lookup, &b.x_domain) ^ b.x_flip,
                    parity(&lookup, &b.z_domain) ^ b.z_flip,
                )
            })
            .collect()
    }

    fn outcome_lookup(&self, outcomes: &[u8]) -> HashMap<u32, u8> {
        self.steps
            .iter()
            .zip(outcomes)
            .map(|(s, &k)| (s.qubit, k))
            .collect()
    }
}

fn parity(lookup: &HashMap<u32, u8>, domain: &[u32]) -> bool {
    domain.iter().fold(false, |acc, q| {
        acc ^ (lookup.get(q).copied().unwrap_or(0) == 1)
    })
}

/// How outcomes are chosen during execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeSource {
    /// Every branch with non-zero probability.
    Exhaustive,
    /// `runs` independent branches drawn with the Born probabilities.
    Sampled { seed: u64, runs: usize },
    /// One branch with the given outcomes, in step order.
    Forced(Vec<u8>),
}

/// One executed outcome branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Outcomes in step order.
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Normalized state of the output qubits, in the pattern's output order.
    pub output: PureState,
    /// `(qubit, x, z)` byproduct on each output with a byproduct entry.
    pub byproduct: Vec<(u32, bool, bool)>,
    /// `output` with the byproduct undone.
    pub corrected: PureState,
}

/// Runs `p` on `s`. The state must consist of exactly the measured and output qubits.
pub fn execute_pattern(
    s: &PureState,
    p: &MeasurementPattern,
    source: &OutcomeSource,
) -> Result<Vec<Branch>> {
    p.validate()?;
    let norm = s.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let mut expected: Vec<u32> = p.measured();
    expected.extend(&p.outputs);
    expected.sort_unstable();
    let mut have = s.labels().to_vec();
    have.sort_unstable();
    if expected != have {
        return Err(Error::InvalidPattern(format!(
            "state qubits {have:?} differ from measured plus output qubits {expected:?}"
        )));
    }
    let leaves = match source {
        OutcomeSource::Exhaustive => explore(p, s.clone(), Vec::new(), 1.0)?,
        OutcomeSource::Forced(outcomes) => {
            if outcomes.len() != p.steps.len() || outcomes.iter().any(|&k| k > 1) {
                return Err(Error::InvalidPattern(format!(
                    "{} forced outcomes for {} steps",
                    outcomes.len(),
                    p.steps.len()
                )));
            }
            vec![walk(p, s, |i, probs| {
                let k = outcomes[i];
                if probs[k as usize] <= IMPOSSIBLE_TOL {
                    return Err(Error::ImpossibleOutcome {
                        step: i,
                        outcome: k,
                        probability: probs[k as usize],
                    });
                }
                Ok(k)
            })?]
        }
        OutcomeSource::Sampled { seed, runs } => (0..*runs)
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(r as u64);
                walk(p, s, |_, probs| {
                    Ok(u8::from(
                        rng.gen::<f64>() * (probs[0] + probs[1]) >= probs[0],
                    ))
                })
            })
            .collect::<Result<_>>()?,
    };
    leaves
        .into_iter()
        .map(|(outcomes, probability, state)| finish(p, outcomes, probability, state))
        .collect()
}

fn step_vectors(p: &MeasurementPattern, i: usize, outcomes: &[u8]) -> [[Complex64; 2]; 2] {
    let step = &p.steps[i];
    let lookup = p.outcome_lookup(outcomes);
    let (theta, phi) = step.basis.adapted(
        parity(&lookup, &step.s_domain),
        parity(&lookup, &step.t_domain),
    );
    [basis_vector(theta, phi, 0), basis_vector(theta, phi, 1)]
}

type Leaf = (Vec<u8>, f64, PureState);

/// Depth-first over both outcomes of each step, sharing the state of common prefixes.
fn explore(
    p: &MeasurementPattern,
    s: PureState,
    outcomes: Vec<u8>,
    prob: f64,
) -> Result<Vec<Leaf>> {
    let i = outcomes.len();
    if i == p.steps.len() {
        return Ok(vec![(outcomes, prob, s)]);
    }
    let vs = step_vectors(p, i, &outcomes);
    let child = |k: u8| -> Result<Vec<Leaf>> {
        let rest = s.contract_qubit(p.steps[i].qubit, vs[k as usize])?;
        let pk = rest.norm_sqr();
        if pk <= IMPOSSIBLE_TOL {
            return Ok(Vec::new());
        }
        let mut next = outcomes.clone();
        next.push(k);
        explore(p, rest.scaled(pk.sqrt().recip()), next, prob * pk)
    };
    let (a, b) = rayon::join(|| child(0), || child(1));
    let mut out = a?;
    out.extend(b?);
    Ok(out)
}

/// Single branch; `choose(step, [p0, p1])` picks each outcome.
fn walk(
    p: &MeasurementPattern,
    s: &PureState,
    mut choose: impl FnMut(usize, [f64; 2]) -> Result<u8>,
) -> Result<Leaf> {
    let mut s = s.clone();
    let mut outcomes = Vec::with_capacity(p.steps.len());
    let mut prob = 1.0;
    for i in 0..p.steps.len() {
        let vs = step_vectors(p, i, &outcomes);
        let rests = [
            s.contract_qubit(p.steps[i].qubit, vs[0])?,
            s.contract_qubit(p.steps[i].qubit, vs[1])?,
        ];
        let probs = [rests[0].norm_sqr(), rests[1].norm_sqr()];
        let k = choose(i, probs)?;
        let pk = probs[k as usize];
        let [r0, r1] = rests;
        let rest = if k == 0 { r0 } else { r1 };
        s = rest.scaled(pk.sqrt().recip());
        prob *= pk;
        outcomes.push(k);
    }
    Ok((outcomes, prob, s))
}

fn finish(
    p: &MeasurementPattern,
    outcomes: Vec<u8>,
    probability: f64,
    state: PureState,
) -> Result<Branch> {
    let output = state.reordered(&p.outputs)?;
    let byproduct = p.byproduct(&outcomes);
    let mut corrected = output.clone();
    for &(q, x, z) in &byproduct {
        if x {
            corrected = corrected.apply_single(q, &Pauli::X.matrix())?;
        }
        if z {
            corrected = corrected.apply_single(q, &Pauli::Z.matrix())?;
        }
    }
    Ok(Branch {
        outcomes,
        probability,
        output,
        byproduct,
        corrected,
    })
}

/// Input state on its own qubits, `|+>` on every other vertex of `g`, then `CZ` on
/// every edge. Input qubits come first in the result's qubit order.
pub fn prepare_resource(input: &PureState, g: &Graph, limit: usize) -> Result<PureState> {
    for &l in input.labels() {
        if !g.contains(l) {
            return Err(Error::UnknownLabel(l));
        }
    }
    if g.n() > limit {
        return Err(Error::SizeLimit {
            what: "pattern resource state",
            n: g.n(),
            limit,
        });
    }
    let fresh: Vec<u32> = g
        .labels()
        .iter()
        .copied()
        .filter(|l| !input.labels().contains(l))
        .collect();
    let mut s = input.tensor(&PureState::plus(fresh))?;
    for (a, b) in g.edges() {
        s = s.apply_cz(a, b)?;
    }
    Ok(s)
}

/// Summary of a pattern run against an intended output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternCheck {
    pub branches: usize,
    pub min_fidelity: f64,
    pub total_probability: f64,
}

impl PatternCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.branches > 0 && self.min_fidelity >= 1.0 - tol
    }
}

/// Runs the pattern and compares each corrected output with `target` (a state on the
/// output qubits).
pub fn verify_pattern(
    s: &PureState,
    p: &MeasurementPattern,
    target: &PureState,
    source: &OutcomeSource,
) -> Result<PatternCheck> {
    let target = target.reordered(&p.outputs)?;
    let branches = execute_pattern(s, p, source)?;
    let mut check = PatternCheck {
        branches: branches.len(),
        min_fidelity: f64::INFINITY,
        total_probability: 0.0,
    };
    for b in &branches {
        check.min_fidelity = check.min_fidelity.min(b.corrected.fidelity(&target)?);
        check.total_probability += b.probability;
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstate::Clifford;

    fn plus_chain(n: usize, input: &PureState) -> PureState {
        prepare_resource(input, &Graph::path(n), 20).unwrap()
    }

    #[test]
    fn basis_vectors_match_pauli_eigenvectors() {
        for (basis, pauli) in [
            (Basis::X, Pauli::X),
            (Basis::Y, Pauli::Y),
            (Basis::Z, Pauli::Z),
        ] {
            let (t, f) = basis.angles();
            for k in 0..2u8 {
                let v = basis_vector(t, f, k);
                let m = pauli.matrix();
                let mv = [
                    m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1],
                ];
                let sign = if k == 0 { 1.0 } else { -1.0 };
                assert!(
                    (mv[0] - v[0] * sign).norm() < 1e-12 && (mv[1] - v[1] * sign).norm() < 1e-12
                );
            }
        }
    }

    #[test]
    fn adaptation_is_pauli_conjugation() {
        let b = Basis::Bloch {
            theta: 0.7,
            phi: 1.9,
        };
        let (t, f) = b.angles();
        for (s, tt, p) in [(true, false, Pauli::X), (false, true, Pauli::Z)] {
            let (t2, f2) = b.adapted(s, tt);
            let m = p.matrix();
            let v = basis_vector(t, f, 0);
            let w = [
                m[0][0] * v[0] + m[0][1] * v[1],
                m[1][0] * v[0] + m[1][1] * v[1],
            ];
            let u = basis_vector(t2, f2, 0);
            let overlap = (u[0].conj() * w[0] + u[1].conj() * w[1]).norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_pattern_leaves_state_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = PureState::random(3, &mut rng);
        let p = MeasurementPattern {
            steps: vec![],
            outputs: vec![2, 0, 1],
            byproducts: vec![],
        };
        let b = execute_pattern(&s, &p, &OutcomeSource::Exhaustive).unwrap();
        assert_eq!(b.len(), 1);
        assert!(
            b[0].output
                .fidelity(&s.reordered(&[2, 0, 1]).unwrap())
                .unwrap()
                > 1.0 - 1e-12
        );
    }

    #[test]
    fn one_step_teleports_through_hadamard() {
        // measuring X on the first qubit of a two-qubit chain leaves X^k H |psi>
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = PureState::random(1, &mut rng);
        let s = plus_chain(2, &psi);
        let p = MeasurementPattern {
            steps: vec![Step::new(0, Basis::X)],
            outputs: vec![1],
            byproducts: vec![Byproduct {
                qubit: 1,
                x_domain: vec![0],
                z_domain: vec![],
                x_flip: false,
                z_flip: false,
            }],
        };
        let h = Clifford::hadamard().matrix();
        let target = PureState::from_amplitudes(
            vec![1],
            psi.apply_single(0, &h).unwrap().amplitudes().to_vec(),
        )
        .unwrap();
        let c = verify_pattern(&s, &p, &target, &OutcomeSource::Exhaustive).unwrap();
        assert_eq!(c.branches, 2);
        assert!(c.passed(1e-12) && (c.total_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forced_impossible_outcome_is_an_error() {
        let s = PureState::zero(vec![0, 1]);
        let p = MeasurementPattern {
            steps: vec![Step::new(0, Basis::Z)],
            outputs: vec![1],
            byproducts: vec![],
        };
        assert!(matches!(
            execute_pattern(&s, &p, &OutcomeSource::Forced(vec![1])),
            Err(Error::ImpossibleOutcome {
                step: 0,
                outcome: 1,
                ..
            })
        ));
        // exhaustive mode skips the zero-probability branch
        assert_eq!(
            execute_pattern(&s, &p, &OutcomeSource::Exhaustive)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn sampled_runs_are_reproducible() {
        let s = PureState::random(4, &mut ChaCha8Rng::seed_from_u64(8));
        let p = MeasurementPattern {
            steps: vec![
                Step::new(0, Basis::Plane { alpha: 0.3 }),
                Step::new(1, Basis::Y).with_s(&[0]),
            ],
            outputs: vec![2, 3],
            byproducts: vec![],
        };
        let src = OutcomeSource::Sampled { seed: 11, runs: 6 };
        let a = execute_pattern(&s, &p, &src).unwrap();
        let b = execute_pattern(&s, &p, &src).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn validation_rejects_bad_patterns() {
        let st = |q| Step::new(q, Basis::Z);
        let cases = [
            MeasurementPattern {
                steps: vec![st(0), st(0)],
                outputs: vec![1],
                byproducts: vec![],
            },
            MeasurementPattern {
                steps: vec![st(0).with_s(&[1]), st(1)],
                outputs: vec![2],
                byproducts: vec![],
            },
            MeasurementPattern {
                steps: vec![st(0)],
                outputs: vec![0],
                byproducts: vec![],
            },
            MeasurementPattern {
                steps: vec![st(0)],
                outputs: vec![1],
                byproducts: vec![Byproduct {
                    qubit: 2,
                    x_domain: vec![],
                    z_domain: vec![],
                    x_flip: false,
                    z_flip: false,
                }],
            },
            MeasurementPattern {
                steps: vec![st(0)],
                outputs: vec![1],
                byproducts: vec![Byproduct {
                    qubit: 1,
                    x_domain: vec![5],
                    z_domain: vec![],
                    x_flip: false,
                    z_flip: false,
                }],
            },
        ];
        for p in cases {
            assert!(
                matches!(p.validate(), Err(Error::InvalidPattern(_))),
                "{p:?}"
            );
        }
    }

    #[test]
    fn json_roundtrip_with_defaults() {
        let text = r#"{"steps":[{"qubit":0,"basis":{"type":"plane","alpha":0.5}},{"qubit":1,"basis":{"type":"y"},"s_domain":[0]}],
                      "outputs":[2],"byproducts":[{"qubit":2,"x_domain":[1],"z_flip":true}]}"#;
        let p: MeasurementPattern = serde_json::from_str(text).unwrap();
        assert_eq!(p.steps[1].s_domain, vec![0]);
        assert!(p.byproducts[0].z_flip && !p.byproducts[0].x_flip);
        let back: MeasurementPattern =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
