//! `verify-protocol`: the lattice conversion chain and the gate patterns.

use clap::ValueEnum;
use mqc_lab::lattices::gates::{
    bridge_cz, bridge_cz_unitary, cnot15, cnot_unitary, euler_angles, euler_rotation, to_dense,
    GateFixture,
};
use mqc_lab::lattices::{
    run_conversion_chain, ChainOptions, ConversionReport, OutcomeSource, PatternCheck, FIDELITY_TOL,
};
use mqc_lab::PureState;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{csv_table, Report, Status, UsageError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Hexagonal to triangular to Kagome to square lattice by Pauli measurements.
    HexToSquare,
    /// Five-qubit chain implementing an arbitrary rotation.
    EulerRotation,
    /// Y measurement on a bridge qubit joining two wires.
    BridgeCz,
    /// Fifteen-qubit CNOT pattern.
    Cnot,
}

/// Parses `N` or `N1xN2`.
pub fn parse_extent(text: &str) -> anyhow::Result<(usize, usize)> {
    let parse = |s: &str| s.trim().parse::<usize>().ok().filter(|&v| v > 0);
    let e = match text.split_once(['x', 'X']) {
        Some((a, b)) => parse(a).zip(parse(b)),
        None => parse(text).map(|d| (d, d)),
    };
    e.ok_or_else(|| {
        UsageError(format!(
            "extent must be N or N1xN2 with positive sides, got {text:?}"
        ))
        .into()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateTrial {
    pub trial: usize,
    pub branches: usize,
    pub min_fidelity: f64,
    pub total_probability: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub seed: u64,
    pub trials: Vec<GateTrial>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolResult {
    Conversion(ConversionReport),
    Gate(GateReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub protocol: Protocol,
    pub result: ProtocolResult,
    pub passed: bool,
}

/// Haar-random SU(2): its first column is a Haar-random unit vector.
pub fn random_su2<R: Rng>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let s = PureState::random(1, rng);
    let (x, y) = (s.amplitudes()[0], s.amplitudes()[1]);
    [[x, -y.conj()], [y, x.conj()]]
}

fn random_input<R: Rng>(labels: Vec<u32>, rng: &mut R) -> mqc_lab::Result<PureState> {
    let s = PureState::random(labels.len(), rng);
    PureState::from_amplitudes(labels, s.amplitudes().to_vec())
}

/// Runs `trials` exhaustive checks, each on a fresh random input to `fixture`.
fn gate_trials(
    trials: usize,
    seed: u64,
    check: impl Fn(&GateFixture, &PureState, &mut ChaCha8Rng) -> mqc_lab::Result<PatternCheck>,
    fixture: impl Fn() -> GateFixture,
) -> anyhow::Result<GateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let f = fixture();
        let input = random_input(f.inputs.clone(), &mut rng)?;
        let c = check(&f, &input, &mut rng)?;
        out.push(GateTrial {
            trial: t,
            branches: c.branches,
            min_fidelity: c.min_fidelity,
            total_probability: c.total_probability,
            passed: c.passed(FIDELITY_TOL) && (c.total_probability - 1.0).abs() <= FIDELITY_TOL,
        });
    }
    let passed = out.iter().all(|t| t.passed);
    Ok(GateReport {
        seed,
        trials: out,
        tolerance: FIDELITY_TOL,
        passed,
    })
}

pub fn verify_protocol(
    protocol: Protocol,
    extent: (usize, usize),
    trials: usize,
    opts: &ChainOptions,
) -> anyhow::Result<ProtocolReport> {
    let all = OutcomeSource::Exhaustive;
    let result = match protocol {
        Protocol::HexToSquare => {
            ProtocolResult::Conversion(run_conversion_chain(extent.0, extent.1, opts)?)
        }
        // the rotation is drawn per trial, so the fixture is rebuilt inside the check
        Protocol::EulerRotation => ProtocolResult::Gate(gate_trials(
            trials,
            opts.seed,
            |_, input, rng| {
                let u = random_su2(rng);
                let (a, b, c) = euler_angles(&u);
                euler_rotation(a, b, c).verify(input, &to_dense(&u), &all)
            },
            || euler_rotation(0.0, 0.0, 0.0),
        )?),
        Protocol::BridgeCz => ProtocolResult::Gate(gate_trials(
            trials,
            opts.seed,
            |f, input, _| f.verify(input, &bridge_cz_unitary(), &all),
            bridge_cz,
        )?),
        Protocol::Cnot => ProtocolResult::Gate(gate_trials(
            trials,
            opts.seed,
            |f, input, _| f.verify(input, &cnot_unitary(), &all),
            cnot15,
        )?),
    };
    let passed = match &result {
        ProtocolResult::Conversion(r) => r.passed,
        ProtocolResult::Gate(g) => g.passed,
    };
    Ok(ProtocolReport {
        protocol,
        result,
        passed,
    })
}

#[derive(Serialize)]
struct StageRow<'a> {
    stage: &'a str,
    qubits_before: usize,
    qubits_after: usize,
    measured: usize,
    corrections: usize,
    structure_ok: bool,
    branches: Option<usize>,
    exhaustive: Option<bool>,
    deterministic: Option<bool>,
    statevec_branches: Option<usize>,
    min_fidelity: Option<f64>,
    passed: bool,
}

impl Report for ProtocolReport {
    fn status(&self) -> Status {
        if self.passed {
            Status::Ok
        } else {
            Status::StructuralFailure
        }
    }

    fn csv(&self) -> anyhow::Result<String> {
        match &self.result {
            ProtocolResult::Conversion(r) => csv_table(r.stages.iter().map(|s| {
                let c = s.check.as_ref();
                StageRow {
                    stage: &s.stage,
                    qubits_before: s.qubits_before,
                    qubits_after: s.qubits_after,
                    measured: s.measured,
                    corrections: s.corrections,
                    structure_ok: s.structure_ok,
                    branches: c.map(|c| c.branches),
                    exhaustive: c.map(|c| c.exhaustive),
                    deterministic: c.map(|c| c.deterministic),
                    statevec_branches: c.map(|c| c.statevec_branches),
                    min_fidelity: c.and_then(|c| c.min_fidelity),
                    passed: s.passed,
                }
            })),
            ProtocolResult::Gate(g) => csv_table(&g.trials),
        }
    }
}
