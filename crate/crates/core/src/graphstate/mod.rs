//! Graph states with an exact local-Clifford byproduct frame.
//!
//! A [`GraphState`] stands for the vector `(⊗_v C_v) |G>`, where `|G>` is the graph
//! state `prod_{(a,b) in E} CZ_ab |+>^n` and `C_v` is the frame Clifford at vertex
//! `v`. Pauli `Y` and `Z` measurements are carried out on this representation:
//!
//! - `Z` with outcome `k` deletes the vertex and multiplies `Z^k` into the frame of
//!   each former neighbour;
//! - `Y` with outcome `k` locally complements at the vertex, deletes it, and
//!   multiplies `sqrt((-1)^k (-i Z))` into the frame of each former neighbour.
//!
//! If the frame at the measured qubit is not trivial, the requested basis is pulled
//! back through it first. Both outcomes of a `Y`/`Z` measurement on a graph state
//! occur with probability 1/2.

pub mod clifford;
mod graph;
pub mod io;

pub use clifford::{Clifford, Mat2, Pauli};
pub use graph::{pauli_string, EdgeList, Graph};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::PureState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphState {
    graph: Graph,
    frame: Vec<Clifford>,
}

/// A local Clifford applied to (or recorded on) a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalClifford {
    pub qubit: u32,
    pub clifford: Clifford,
}

impl GraphState {
    /// Graph state with the identity frame.
    pub fn new(graph: Graph) -> Self {
        let frame = vec![Clifford::IDENTITY; graph.n()];
        Self { graph, frame }
    }

    pub fn with_frame(graph: Graph, frame: Vec<Clifford>) -> Result<Self> {
        if frame.len() != graph.n() {
            return Err(Error::Dimension(format!(
                "{} frame entries for {} qubits",
                frame.len(),
                graph.n()
            )));
        }
        Ok(Self { graph, frame })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn frame_of(&self, qubit: u32) -> Result<Clifford> {
        Ok(self.frame[self.graph.position(qubit)?])
    }

    /// Frame entries in vertex-position order.
    pub fn frame(&self) -> &[Clifford] {
        &self.frame
    }

    pub fn has_trivial_frame(&self) -> bool {
        self.frame.iter().all(|c| c.is_identity())
    }

    /// Multiplies `c` onto the frame of `qubit` (applied after the existing frame).
    pub fn apply_clifford(&self, qubit: u32, c: Clifford) -> Result<GraphState> {
        let mut out = self.clone();
        let p = out.graph.position(qubit)?;
        out.frame[p] = c * out.frame[p];
        Ok(out)
    }

    /// Measures `qubit` in the Pauli `basis` and keeps the branch with eigenvalue
    /// `(-1)^outcome`. The measured qubit is removed.
    pub fn measure_pauli(&self, qubit: u32, basis: Pauli, outcome: u8) -> Result<GraphState> {
        if outcome > 1 {
            return Err(Error::InvalidOperator("outcome (must be 0 or 1)"));
        }
        let pos = self.graph.position(qubit)?;
        let (neg, effective) = self.frame[pos].pull_back(basis);
        let k = outcome ^ u8::from(neg);
        let correction = match effective {
            Pauli::Z => Clifford::z_correction(k),
            Pauli::Y => Clifford::y_correction(k),
            Pauli::X | Pauli::I => {
                return Err(Error::UnsupportedBasis(format!(
                    "{basis} on qubit {qubit} (acts as {effective} on the underlying graph)"
                )))
            }
        };
        let neighbors = self.graph.neighbor_positions(pos);
        let mut out = self.clone();
        for &b in &neighbors {
            out.frame[b] = out.frame[b] * correction;
        }
        if effective == Pauli::Y {
            out.graph.local_complement_in_place(qubit)?;
        }
        out.graph.remove_vertex_in_place(qubit)?;
        out.frame.remove(pos);
        Ok(out)
    }

    /// Measures with a uniformly random outcome (both are equally likely).
    pub fn measure_pauli_random<R: Rng>(
        &self,
        qubit: u32,
        basis: Pauli,
        rng: &mut R,
    ) -> Result<(u8, GraphState)> {
        let k = u8::from(rng.gen_bool(0.5));
        Ok((k, self.measure_pauli(qubit, basis, k)?))
    }

    /// Applies the inverse frame at each listed qubit, returning the state with those
    /// frames reset and the unitaries that were applied.
    pub fn apply_corrections(&self, qubits: &[u32]) -> Result<(GraphState, Vec<LocalClifford>)> {
        let mut out = self.clone();
        let mut applied = Vec::new();
        for &q in qubits {
            let p = out.graph.position(q)?;
            if !out.frame[p].is_identity() {
                applied.push(LocalClifford {
                    qubit: q,
                    clifford: out.frame[p].inverse(),
                });
                out.frame[p] = Clifford::IDENTITY;
            }
        }
        Ok((out, applied))
    }

    /// Dense vector of this state; qubit order follows vertex positions.
    pub fn to_statevector(&self, limit: usize) -> Result<PureState> {
        let n = self.n();
        if n > limit || n > 30 {
            return Err(Error::SizeLimit {
                what: "state vector",
                n,
                limit: limit.min(30),
            });
        }
        let rows = self.graph.row_masks().expect("n <= 30");
        let dim = 1usize << n;
        let a = (dim as f64).sqrt().recip();
        let amps: Vec<Complex64> = (0..dim)
            .map(|x| {
                let x64 = x as u64;
                // twice the number of edges inside x
                let twice: u32 = (0..n)
                    .filter(|&i| x >> i & 1 == 1)
                    .map(|i| (rows[i] & x64).count_ones())
                    .sum();
                if (twice / 2).is_multiple_of(2) {
                    Complex64::new(a, 0.0)
                } else {
                    Complex64::new(-a, 0.0)
                }
            })
            .collect();
        let mut s = PureState::from_amplitudes(self.graph.labels().to_vec(), amps)?;
        for (q, c) in self.frame.iter().enumerate() {
            if !c.is_identity() {
                s.apply_single_in_place(q, &c.matrix());
            }
        }
        Ok(s)
    }

    /// Frame-conjugated correlation operators `C K_a C^dagger`, with their signs.
    pub fn stabilizers(&self) -> Vec<(bool, Vec<Pauli>)> {
        self.graph
            .stabilizer_generators()
            .into_iter()
            .map(|k| {
                let mut neg = false;
                let ops = k
                    .iter()
                    .zip(&self.frame)
                    .map(|(&p, c)| {
                        let (s, q) = c.conjugate(p);
                        neg ^= s;
                        q
                    })
                    .collect();
                (neg, ops)
            })
            .collect()
    }
}
