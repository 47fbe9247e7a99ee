//! Gate-simulation fixtures: a single-qubit rotation on a 5-qubit chain, a
//! controlled-phase between two wires through a bridge qubit, and a 15-qubit CNOT.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pattern::{
    prepare_resource, verify_pattern, Basis, Byproduct, MeasurementPattern, OutcomeSource,
    PatternCheck, Step,
};
use crate::error::{Error, Result};
use crate::graphstate::{Graph, Mat2};
use crate::statevec::PureState;

/// A resource graph, the qubits carrying the input state, and the pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct GateFixture {
    pub graph: Graph,
    pub inputs: Vec<u32>,
    pub pattern: MeasurementPattern,
}

impl GateFixture {
    /// Resource state for `input`, whose qubits must be labelled like `self.inputs`.
    pub fn resource(&self, input: &PureState, limit: usize) -> Result<PureState> {
        if input.labels() != self.inputs.as_slice() {
            return Err(Error::Dimension(format!(
                "input qubits {:?}, expected {:?}",
                input.labels(),
                self.inputs
            )));
        }
        prepare_resource(input, &self.graph, limit)
    }

    /// Checks that every branch outputs `unitary * input` (up to the byproduct) on the
    /// output qubits. The unitary acts on amplitudes in input qubit order.
    pub fn verify(
        &self,
        input: &PureState,
        unitary: &DMatrix<Complex64>,
        source: &OutcomeSource,
    ) -> Result<PatternCheck> {
        let s = self.resource(input, crate::DEFAULT_STATEVEC_LIMIT)?;
        let target = apply_dense(input, unitary)?;
        let target =
            PureState::from_amplitudes(self.pattern.outputs.clone(), target.amplitudes().to_vec())?;
        verify_pattern(&s, &self.pattern, &target, source)
    }
}

/// `unitary * s` on the amplitude vector.
pub fn apply_dense(s: &PureState, unitary: &DMatrix<Complex64>) -> Result<PureState> {
    let dim = s.amplitudes().len();
    if unitary.nrows() != dim || unitary.ncols() != dim {
        return Err(Error::Dimension(format!(
            "{}x{} matrix on {dim} amplitudes",
            unitary.nrows(),
            unitary.ncols()
        )));
    }
    let v = DMatrix::from_column_slice(dim, 1, s.amplitudes());
    PureState::from_amplitudes(s.labels().to_vec(), (unitary * v).as_slice().to_vec())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(-i t X / 2)`.
pub fn rx(t: f64) -> Mat2 {
    let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
    [
        [c(co), Complex64::new(0.0, -si)],
        [Complex64::new(0.0, -si), c(co)],
    ]
}

/// `exp(-i t Z / 2)`.
pub fn rz(t: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -t / 2.0), c(0.0)],
        [c(0.0), Complex64::from_polar(1.0, t / 2.0)],
    ]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn to_dense(m: &Mat2) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// `Rx(a) Rz(b) Rx(c)`.
pub fn euler_unitary(a: f64, b: f64, c: f64) -> Mat2 {
    mul(&mul(&rx(a), &rz(b)), &rx(c))
}

/// Angles `(a, b, c)` with `u = Rx(a) Rz(b) Rx(c)` up to global phase.
pub fn euler_angles(u: &Mat2) -> (f64, f64, f64) {
    // H u H = Rz(a) Rx(b) Rz(c)
    let h = [
        [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
        [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
    ];
    let w = mul(&mul(&h, u), &h);
    let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
    let r = det.sqrt();
    let w = w.map(|row| row.map(|z| z / r));
    let b = 2.0 * w[1][0].norm().atan2(w[0][0].norm());
    let sum = if w[1][1].norm() > 1e-12 {
        2.0 * w[1][1].arg()
    } else {
        0.0
    };
    let diff = if w[1][0].norm() > 1e-12 {
        2.0 * (Complex64::i() * w[1][0]).arg()
    } else {
        0.0
    };
    ((sum + diff) / 2.0, b, (sum - diff) / 2.0)
}

/// Chain `1 - 2 - 3 - 4 - 5` with the input on qubit 1 and the output on qubit 5,
/// implementing `Rx(a) Rz(b) Rx(c)`.
pub fn euler_rotation(a: f64, b: f64, c: f64) -> GateFixture {
    let graph = Graph::path(5).relabel(|v| v + 1).expect("chain labels");
    let pattern = MeasurementPattern {
        steps: vec![
            Step::new(1, Basis::Plane { alpha: 0.0 }),
            Step::new(2, Basis::Plane { alpha: -c }).with_s(&[1]),
            Step::new(3, Basis::Plane { alpha: -b }).with_s(&[2]),
            Step::new(4, Basis::Plane { alpha: -a }).with_s(&[1, 3]),
        ],
        outputs: vec![5],
        byproducts: vec![Byproduct {
            qubit: 5,
            x_domain: vec![2, 4],
            z_domain: vec![1, 3],
            x_flip: false,
            z_flip: false,
        }],
    };
    GateFixture {
        graph,
        inputs: vec![1],
        pattern,
    }
}

/// Wires `1 - 2` and `4 - 5` joined through the bridge qubit `3` (edges `1 - 3`,
/// `3 - 4`). Measuring `Y` on the bridge and on the inputs leaves
/// `(H ⊗ H) CZ` applied to the input on qubits `(2, 5)`.
pub fn bridge_cz() -> GateFixture {
    let mut graph = Graph::with_labels((1..=5).collect()).expect("labels");
    for (a, b) in [(1, 2), (4, 5), (1, 3), (3, 4)] {
        graph.add_edge(a, b).expect("bridge graph");
    }
    let pattern = MeasurementPattern {
        steps: vec![
            Step::new(3, Basis::Y),
            Step::new(1, Basis::Plane { alpha: FRAC_PI_2 }),
            Step::new(4, Basis::Plane { alpha: FRAC_PI_2 }),
        ],
        outputs: vec![2, 5],
        byproducts: vec![
            Byproduct {
                qubit: 2,
                x_domain: vec![1, 3],
                z_domain: vec![],
                x_flip: false,
                z_flip: false,
            },
            Byproduct {
                qubit: 5,
                x_domain: vec![4, 3],
                z_domain: vec![],
                x_flip: false,
                z_flip: false,
            },
        ],
    };
    GateFixture {
        graph,
        inputs: vec![1, 4],
        pattern,
    }
}

/// The two-qubit unitary the bridge pattern implements, in input order.
pub fn bridge_cz_unitary() -> DMatrix<Complex64> {
    let h = to_dense(&[
        [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
        [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
    ]);
    h.kronecker(&h) * cz_unitary()
}

pub fn cz_unitary() -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0),
        c(1.0),
        c(1.0),
        c(-1.0),
    ]))
}

/// CNOT with the control on the first input qubit (low amplitude bit).
pub fn cnot_unitary() -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(4, 4, c(0.0));
    for (from, to) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
        m[(to, from)] = c(1.0);
    }
    m
}

/// Two chains `1 ... 7` (control) and `9 ... 15` (target) joined by `4 - 8 - 12`.
/// Inputs on `1`, `9`; outputs on `7`, `15`.
pub fn cnot15() -> GateFixture {
    let mut graph = Graph::with_labels((1..=15).collect()).expect("labels");
    for (a, b) in (1..7)
        .map(|v| (v, v + 1))
        .chain((9..15).map(|v| (v, v + 1)))
        .chain([(4, 8), (8, 12)])
    {
        graph.add_edge(a, b).expect("cnot graph");
    }
    let x_qubits = [1, 9, 10, 11, 13, 14];
    let order = [1, 9, 10, 11, 13, 14, 2, 3, 4, 5, 6, 8, 12];
    let steps = order
        .iter()
        .map(|&q| {
            Step::new(
                q,
                if x_qubits.contains(&q) {
                    Basis::X
                } else {
                    Basis::Y
                },
            )
        })
        .collect();
    let pattern = MeasurementPattern {
        steps,
        outputs: vec![7, 15],
        byproducts: vec![
            Byproduct {
                qubit: 7,
                x_domain: vec![2, 3, 5, 6],
                z_domain: vec![1, 3, 4, 5, 8, 9, 11],
                x_flip: false,
                z_flip: true,
            },
            Byproduct {
                qubit: 15,
                x_domain: vec![2, 3, 8, 10, 12, 14],
                z_domain: vec![9, 11, 13],
                x_flip: false,
                z_flip: false,
            },
        ],
    };
    GateFixture {
        graph,
        inputs: vec![1, 9],
        pattern,
    }
}
