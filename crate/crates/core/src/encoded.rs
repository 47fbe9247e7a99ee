//! Logical encodings of qubits into blocks of physical qubits.
//!
//! An [`Encoding`] fixes two orthogonal `m`-qubit states `|0_L>`, `|1_L>`. Encoding an
//! `n`-qubit state `sum_x c_x |x>` replaces each basis state by
//! `|x_1>_L ⊗ ... ⊗ |x_n>_L`; logical qubit `i` becomes physical qubits
//! `i*m .. i*m + m - 1`.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::{Mat2, Pauli};
use crate::lattices::{basis_vector, MeasurementPattern};
use crate::monotones::max_bipartite_rank;
use crate::statevec::{Bipartition, PureState, IMPOSSIBLE_TOL};
use crate::widths::{state_width_blocks, StateCutKind, WidthOptions};

/// Orthogonality tolerance for logical basis states and measurement pairs.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    m: usize,
    zero: PureState,
    one: PureState,
}

/// JSON form: two amplitude lists of `(bitstring, re, im)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingFile {
    pub logical_zero: Vec<(String, f64, f64)>,
    pub logical_one: Vec<(String, f64, f64)>,
}

impl Encoding {
    /// Both states must act on the same number of qubits, be normalized and be
    /// orthogonal. They are relabelled `0..m`.
    pub fn new(zero: &PureState, one: &PureState) -> Result<Self> {
        if zero.n() != one.n() || zero.n() == 0 {
            return Err(Error::Dimension(format!(
                "logical states on {} and {} qubits",
                zero.n(),
                one.n()
            )));
        }
        for s in [zero, one] {
            let norm = s.norm_sqr();
            if (norm - 1.0).abs() > ORTHOGONALITY_TOL {
                return Err(Error::NotNormalized(norm));
            }
        }
        let m = zero.n();
        let labels: Vec<u32> = (0..m as u32).collect();
        let zero = PureState::from_amplitudes(labels.clone(), zero.amplitudes().to_vec())?;
        let one = PureState::from_amplitudes(labels, one.amplitudes().to_vec())?;
        let overlap = zero.inner(&one)?.norm();
        if overlap > ORTHOGONALITY_TOL {
            return Err(Error::NonOrthogonal(overlap));
        }
        Ok(Self { m, zero, one })
    }

    /// `|0>`, `|1>` on a single qubit.
    pub fn trivial() -> Self {
        Self::ghz(1)
    }

    /// `|0...0>`, `|1...1>`.
    pub fn ghz(m: usize) -> Self {
        let labels: Vec<u32> = (0..m as u32).collect();
        let mut one = vec![Complex64::new(0.0, 0.0); 1 << m];
        one[(1 << m) - 1] = Complex64::new(1.0, 0.0);
        let one = PureState::from_amplitudes(labels.clone(), one).expect("basis state");
        Self::new(&PureState::zero(labels), &one).expect("orthogonal basis states")
    }

    /// `|0...0>`, `|W_m>` (`m >= 1`).
    pub fn w(m: usize) -> Self {
        let w = PureState::w(m);
        Self::new(&PureState::zero((0..m as u32).collect()), &w)
            .expect("W is orthogonal to |0...0>")
    }

    pub fn from_file(f: &EncodingFile) -> Result<Self> {
        let m = f.logical_zero.first().map(|e| e.0.len()).unwrap_or(0);
        let labels: Vec<u32> = (0..m as u32).collect();
        let zero = PureState::from_bitstring_map(labels.clone(), &f.logical_zero)?;
        let one = PureState::from_bitstring_map(labels, &f.logical_one)?;
        Self::new(&zero, &one)
    }

    pub fn to_file(&self) -> EncodingFile {
        EncodingFile {
            logical_zero: self.zero.to_bitstring_map(0.0),
            logical_one: self.one.to_bitstring_map(0.0),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn logical_zero(&self) -> &PureState {
        &self.zero
    }

    pub fn logical_one(&self) -> &PureState {
        &self.one
    }

    /// `a |0_L> + b |1_L>` on the given labels.
    pub fn encode_qubit(&self, v: [Complex64; 2], labels: Vec<u32>) -> Result<PureState> {
        if labels.len() != self.m {
            return Err(Error::Dimension(format!(
                "{} labels for a {}-qubit block",
                labels.len(),
                self.m
            )));
        }
        let amps = self
            .zero
            .amplitudes()
            .iter()
            .zip(self.one.amplitudes())
            .map(|(z, o)| v[0] * z + v[1] * o)
            .collect();
        PureState::from_amplitudes(labels, amps)
    }

    /// The `2^m x 2` isometry `[|0_L>, |1_L>]`.
    pub fn isometry(&self) -> DMatrix<Complex64> {
        let dim = 1 << self.m;
        DMatrix::from_fn(dim, 2, |r, c| {
            if c == 0 {
                self.zero.amplitudes()[r]
            } else {
                self.one.amplitudes()[r]
            }
        })
    }
}

/// Disjoint, equally sized qubit blocks covering a system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    blocks: Vec<Vec<u32>>,
}

impl BlockPartition {
    /// Checks that the blocks are non-empty, equally sized, disjoint and cover `all`.
    pub fn new(blocks: Vec<Vec<u32>>, all: &[u32]) -> Result<Self> {
        let m = blocks.first().map_or(0, Vec::len);
        if m == 0 || blocks.iter().any(|b| b.len() != m) {
            return Err(Error::InvalidBipartition(
                "blocks must be non-empty and of equal size".into(),
            ));
        }
        let mut seen = HashSet::new();
        for &q in blocks.iter().flatten() {
            if !seen.insert(q) {
                return Err(Error::DuplicateLabel(q));
            }
        }
        let everything: HashSet<u32> = all.iter().copied().collect();
        if seen != everything {
            return Err(Error::InvalidBipartition(format!(
                "blocks cover {} qubits, system has {}",
                seen.len(),
                all.len()
            )));
        }
        Ok(Self { blocks })
    }

    /// Blocks `[i*m, i*m + m)` for `i < n`.
    pub fn contiguous(n: usize, m: usize) -> Self {
        Self {
            blocks: (0..n)
                .map(|i| (0..m).map(|j| (i * m + j) as u32).collect())
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }
}

/// Encodes every qubit of `s` (in position order) with `e`. Returns the state on
/// labels `0..m*n` and its block partition.
pub fn encode_state(
    s: &PureState,
    e: &Encoding,
    limit: usize,
) -> Result<(PureState, BlockPartition)> {
    let (n, m) = (s.n(), e.m());
    if n * m > limit {
        return Err(Error::SizeLimit {
            what: "encoded state",
            n: n * m,
            limit,
        });
    }
    let (zero, one) = (e.zero.amplitudes(), e.one.amplitudes());
    let mut amps = s.amplitudes().to_vec();
    // replace logical qubit i (sitting at bit i*m of the partially encoded vector)
    for i in 0..n {
        let low_bits = i * m;
        let low = 1usize << low_bits;
        let rest = 1usize << (n - i - 1);
        let mut next = vec![Complex64::new(0.0, 0.0); low * (1 << m) * rest];
        for r in 0..rest {
            for l in 0..low {
                let a0 = amps[l | (r << (low_bits + 1))];
                let a1 = amps[l | (1 << low_bits) | (r << (low_bits + 1))];
                if a0 == Complex64::new(0.0, 0.0) && a1 == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..1usize << m {
                    next[l | (b << low_bits) | (r << (low_bits + m))] = a0 * zero[b] + a1 * one[b];
                }
            }
        }
        amps = next;
    }
    let state = PureState::from_amplitudes((0..(n * m) as u32).collect(), amps)?;
    Ok((state, BlockPartition::contiguous(n, m)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarseMeasure {
    EntanglementWidth,
    SchmidtRankWidth,
    /// Entropy between the listed blocks (by index) and the rest.
    BlockCutEntropy(Vec<usize>),
}

/// `which` evaluated with the blocks of `p` as atomic parties (bits).
pub fn coarse_measure(
    s: &PureState,
    p: &BlockPartition,
    which: &CoarseMeasure,
    opts: &WidthOptions,
) -> Result<f64> {
    BlockPartition::new(p.blocks.clone(), s.labels())?;
    match which {
        CoarseMeasure::EntanglementWidth => {
            Ok(state_width_blocks(s, &p.blocks, StateCutKind::Entropy, opts)?.value)
        }
        CoarseMeasure::SchmidtRankWidth => {
            let kind = StateCutKind::LogSchmidtRank {
                tol: crate::statevec::DEFAULT_RANK_TOL,
            };
            Ok(state_width_blocks(s, &p.blocks, kind, opts)?.value)
        }
        CoarseMeasure::BlockCutEntropy(side) => {
            let mut a = Vec::new();
            for &i in side {
                a.extend(p.blocks.get(i).ok_or(Error::OutOfBounds {
                    index: (i, 0),
                    shape: (p.blocks.len(), 0),
                })?);
            }
            s.entropy(&Bipartition::new(&a, s.labels())?)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    /// A tensor product of single-qubit operators reproduces the logical operator on
    /// the code space (fit residual below tolerance).
    Local,
    /// Impossible for any tensor product: it would map a product logical basis state
    /// to an entangled one (or the reverse).
    NotLocal,
    /// No tensor-product fit was found; a heuristic negative.
    NoFitFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalOperator {
    pub which: Pauli,
    /// `sum_ab P_ab |a_L><b_L|` on the block, row-major, as `(re, im)`.
    pub matrix: Vec<Vec<(f64, f64)>>,
    pub locality: Locality,
    /// Fitted single-qubit factors when `locality` is `Local`.
    pub factors: Option<Vec<Mat2>>,
    pub residual: f64,
}

impl LogicalOperator {
    pub fn dense(&self) -> DMatrix<Complex64> {
        let d = self.matrix.len();
        DMatrix::from_fn(d, d, |r, c| {
            Complex64::new(self.matrix[r][c].0, self.matrix[r][c].1)
        })
    }
}

/// Fit tolerance for tensor-product realizations.
pub const LOCALITY_TOL: f64 = 1e-8;

/// The logical Pauli `which` and whether single-qubit operators realize it.
pub fn logical_pauli(e: &Encoding, which: Pauli) -> Result<LogicalOperator> {
    let v = e.isometry();
    let p = DMatrix::from_fn(2, 2, |r, c| which.matrix()[r][c]);
    let op = &v * &p * v.adjoint();
    let logical = [e.zero.amplitudes().to_vec(), e.one.amplitudes().to_vec()];
    let matrix = (0..op.nrows())
        .map(|r| {
            (0..op.ncols())
                .map(|c| (op[(r, c)].re, op[(r, c)].im))
                .collect()
        })
        .collect();
    // a product operator maps product vectors to product vectors (or zero)
    let m = e.m();
    let entangled = |amps: &[Complex64]| {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        norm > IMPOSSIBLE_TOL
            && max_bipartite_rank(
                &PureState::normalized((0..m as u32).collect(), amps.to_vec()).expect("non-zero"),
            ) > 1
    };
    // images of the logical basis states under the logical operator
    let vp = &v * &p;
    let targets: Vec<Vec<Complex64>> = (0..2)
        .map(|b| vp.column(b).iter().copied().collect())
        .collect();
    for b in 0..2 {
        if !entangled(&logical[b]) && entangled(&targets[b]) {
            return Ok(LogicalOperator {
                which,
                matrix,
                locality: Locality::NotLocal,
                factors: None,
                residual: f64::NAN,
            });
        }
    }
    let (factors, residual) = fit_product_operator(&logical, &targets, m, 0);
    let (locality, factors) = if residual < LOCALITY_TOL {
        (Locality::Local, Some(factors))
    } else {
        (Locality::NoFitFound, None)
    };
    Ok(LogicalOperator {
        which,
        matrix,
        locality,
        factors,
        residual,
    })
}

fn apply_product(factors: &[Mat2], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = v.to_vec();
    for (j, a) in factors.iter().enumerate() {
        let bit = 1usize << j;
        for i in 0..out.len() {
            if i & bit == 0 {
                let (x0, x1) = (out[i], out[i | bit]);
                out[i] = a[0][0] * x0 + a[0][1] * x1;
                out[i | bit] = a[1][0] * x0 + a[1][1] * x1;
            }
        }
    }
    out
}

/// Alternating least squares for single-qubit `A_1..A_m` with
/// `(⊗A_j) inputs[b] ≈ targets[b]`. Returns the best factors and residual norm.
fn fit_product_operator(
    inputs: &[Vec<Complex64>],
    targets: &[Vec<Complex64>],
    m: usize,
    seed: u64,
) -> (Vec<Mat2>, f64) {
    let residual = |f: &[Mat2]| -> f64 {
        inputs
            .iter()
            .zip(targets)
            .map(|(x, t)| {
                apply_product(f, x)
                    .iter()
                    .zip(t)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    };
    let dim = 1usize << m;
    let mut best: Option<(Vec<Mat2>, f64)> = None;
    for restart in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        let mut f: Vec<Mat2> = (0..m)
            .map(|_| {
                let mut g = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                [[g(), g()], [g(), g()]]
            })
            .collect();
        let mut checkpoint = f64::INFINITY;
        for sweep in 0..400 {
            for j in 0..m {
                // everything but factor j applied; the result is linear in A_j
                let mut others = f.clone();
                others[j] = Pauli::I.matrix();
                let rows = inputs.len() * dim;
                let design = DMatrix::from_fn(rows, 4, |row, col| {
                    let (b, x) = (row / dim, row % dim);
                    let (r, c) = (col / 2, col % 2);
                    if (x >> j) & 1 != r {
                        return Complex64::new(0.0, 0.0);
                    }
                    // component of (others)|input> with bit j = c, moved to bit j = r
                    let y = (x & !(1 << j)) | (c << j);
                    apply_product(&others, &inputs[b])[y]
                });
                let rhs = DMatrix::from_fn(rows, 1, |row, _| targets[row / dim][row % dim]);
                if let Ok(sol) = design.svd(true, true).solve(&rhs, 1e-14) {
                    f[j] = [[sol[0], sol[1]], [sol[2], sol[3]]];
                }
            }
            let r = residual(&f);
            if r < LOCALITY_TOL * 1e-2 {
                break;
            }
            // give up once the residual stalls
            if sweep % 50 == 49 {
                if r > 0.999 * checkpoint {
                    break;
                }
                checkpoint = r;
            }
        }
        let r = residual(&f);
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((f, r));
        }
        if r < LOCALITY_TOL {
            break;
        }
    }
    best.expect("at least one restart")
}

/// Outcome statistics of a two-outcome logical measurement on one block.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalMeasurement {
    pub probabilities: [f64; 2],
    /// Normalized states of the remaining qubits (`None` for probability 0).
    pub post_states: [Option<PureState>; 2],
}

/// Projects `block` of `s` onto each of two orthogonal block states. The block
/// states' qubits are matched positionally to `block`.
pub fn logical_two_outcome_measurement(
    s: &PureState,
    block: &[u32],
    pair: (&PureState, &PureState),
) -> Result<LogicalMeasurement> {
    let overlap = pair
        .0
        .inner(&PureState::from_amplitudes(
            pair.0.labels().to_vec(),
            pair.1.amplitudes().to_vec(),
        )?)?
        .norm();
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::NonOrthogonal(overlap));
    }
    let mut probabilities = [0.0; 2];
    let mut post_states = [None, None];
    for (k, target) in [pair.0, pair.1].into_iter().enumerate() {
        let (p, post) = s.project_block(block, target)?;
        probabilities[k] = p;
        post_states[k] = (p > IMPOSSIBLE_TOL).then_some(post);
    }
    Ok(LogicalMeasurement {
        probabilities,
        post_states,
    })
}

/// Applies a `2^m x 2^m` operator to `block` (qubit `j` of the operator is `block[j]`).
pub fn apply_block_operator(
    s: &PureState,
    block: &[u32],
    op: &DMatrix<Complex64>,
) -> Result<PureState> {
    let m = block.len();
    if op.nrows() != 1 << m || op.ncols() != 1 << m {
        return Err(Error::Dimension(format!(
            "{}x{} operator on a {m}-qubit block",
            op.nrows(),
            op.ncols()
        )));
    }
    let rest: Vec<u32> = s
        .labels()
        .iter()
        .copied()
        .filter(|l| !block.contains(l))
        .collect();
    let mut order = block.to_vec();
    order.extend(&rest);
    let t = s.reordered(&order)?;
    let dim = 1usize << m;
    let mut amps = vec![Complex64::new(0.0, 0.0); t.amplitudes().len()];
    for r in 0..1usize << rest.len() {
        for x in 0..dim {
            amps[(r << m) | x] = (0..dim)
                .map(|y| op[(x, y)] * t.amplitudes()[(r << m) | y])
                .sum();
        }
    }
    PureState::from_amplitudes(order, amps)?.reordered(s.labels())
}

/// Side-by-side run of a measurement pattern on a state and on its encoded version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalRunReport {
    pub branches: usize,
    /// Largest difference between matching branch probabilities.
    pub max_probability_gap: f64,
    /// Smallest fidelity between the encoded branch output and the encoded unencoded
    /// branch output.
    pub min_fidelity: f64,
    /// The same after removing the byproduct: physically on the unencoded output and
    /// with logical Paulis on the encoded output.
    pub min_corrected_fidelity: f64,
}

impl LogicalRunReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.branches > 0
            && self.max_probability_gap <= tol
            && self.min_fidelity >= 1.0 - tol
            && self.min_corrected_fidelity >= 1.0 - tol
    }
}

/// Executes every outcome branch of `p` on `s` (qubit-level measurements) and on its
/// encoding (logical block measurements), comparing the two.
pub fn compare_logical_run(
    s: &PureState,
    p: &MeasurementPattern,
    e: &Encoding,
    limit: usize,
) -> Result<LogicalRunReport> {
    p.validate()?;
    let (enc, blocks) = encode_state(s, e, limit)?;
    let block_of = |q: u32| -> Result<Vec<u32>> { Ok(blocks.blocks()[s.position(q)?].clone()) };
    let logical_paulis = [
        logical_pauli(e, Pauli::X)?.dense(),
        logical_pauli(e, Pauli::Z)?.dense(),
    ];
    let steps = p.steps.len();
    let mut report = LogicalRunReport {
        branches: 0,
        max_probability_gap: 0.0,
        min_fidelity: f64::INFINITY,
        min_corrected_fidelity: f64::INFINITY,
    };
    for branch in 0..1u64 << steps {
        let outcomes: Vec<u8> = (0..steps).map(|i| (branch >> i & 1) as u8).collect();
        let (mut plain, mut coded) = (s.clone(), enc.clone());
        let (mut p_plain, mut p_coded) = (1.0, 1.0);
        let mut possible = true;
        for (i, step) in p.steps.iter().enumerate() {
            let lookup = |d: &[u32]| {
                d.iter()
                    .filter(|q| outcomes[p.steps.iter().position(|s| s.qubit == **q).unwrap()] == 1)
                    .count()
                    % 2
                    == 1
            };
            let (theta, phi) = step
                .basis
                .adapted(lookup(&step.s_domain), lookup(&step.t_domain));
            let k = outcomes[i];
            let v = basis_vector(theta, phi, k);
            let pr = plain.branch_probability(step.qubit, v)?;
            if pr <= IMPOSSIBLE_TOL {
                possible = false;
                break;
            }
            plain = plain
                .project_measure(step.qubit, &crate::statevec::projector_from_vector(v))?
                .1;
            p_plain *= pr;
            let block = block_of(step.qubit)?;
            let pair = (
                e.encode_qubit(basis_vector(theta, phi, 0), block.clone())?,
                e.encode_qubit(basis_vector(theta, phi, 1), block.clone())?,
            );
            let lm = logical_two_outcome_measurement(&coded, &block, (&pair.0, &pair.1))?;
            p_coded *= lm.probabilities[k as usize];
            coded = lm.post_states[k as usize]
                .clone()
                .ok_or(Error::ImpossibleOutcome {
                    step: i,
                    outcome: k,
                    probability: lm.probabilities[k as usize],
                })?;
        }
        if !possible {
            continue;
        }
        report.branches += 1;
        report.max_probability_gap = report.max_probability_gap.max((p_plain - p_coded).abs());
        let plain_out = plain.reordered(&p.outputs)?;
        let out_blocks: Vec<u32> = p
            .outputs
            .iter()
            .map(|&q| block_of(q))
            .collect::<Result<Vec<_>>>()?
            .concat();
        let coded_out = coded.reordered(&out_blocks)?;
        let reference = encode_state(&plain_out, e, limit)?.0;
        let coded_out = PureState::from_amplitudes(
            reference.labels().to_vec(),
            coded_out.amplitudes().to_vec(),
        )?;
        report.min_fidelity = report.min_fidelity.min(coded_out.fidelity(&reference)?);
        // undo X^x Z^z: Z^z X^x
        let (mut plain_fix, mut coded_fix) = (plain_out.clone(), coded_out.clone());
        for (q, x, z) in p.byproduct(&outcomes) {
            let pos = p.outputs.iter().position(|&o| o == q).expect("validated");
            let block: Vec<u32> = blocks.blocks()[pos].clone();
            for (flag, pauli, op) in [
                (x, Pauli::X, &logical_paulis[0]),
                (z, Pauli::Z, &logical_paulis[1]),
            ] {
                if flag {
                    plain_fix = plain_fix.apply_single(q, &pauli.matrix())?;
                    coded_fix = apply_block_operator(&coded_fix, &block, op)?;
                }
            }
        }
        let reference = encode_state(&plain_fix, e, limit)?.0;
        report.min_corrected_fidelity = report
            .min_corrected_fidelity
            .min(coded_fix.fidelity(&reference)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_STATEVEC_LIMIT as LIMIT;

    fn bell() -> PureState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        PureState::from_amplitudes(
            vec![0, 1],
            vec![Complex64::new(r, 0.0), z, z, Complex64::new(r, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn trivial_encoding_is_identity() {
        let s = PureState::random(3, &mut ChaCha8Rng::seed_from_u64(1));
        let (e, _) = encode_state(&s, &Encoding::trivial(), LIMIT).unwrap();
        assert_eq!(e.amplitudes(), s.amplitudes());
    }

    #[test]
    fn ghz_encoded_bell_pair_is_ghz4() {
        let (e, p) = encode_state(&bell(), &Encoding::ghz(2), LIMIT).unwrap();
        assert!(e.fidelity(&PureState::ghz(4)).unwrap() > 1.0 - 1e-12);
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn encoding_preserves_norm_and_rejects_bad_pairs() {
        let s = PureState::random(3, &mut ChaCha8Rng::seed_from_u64(2));
        let (e, _) = encode_state(&s, &Encoding::w(3), LIMIT).unwrap();
        assert!((e.norm_sqr() - 1.0).abs() < 1e-12);
        let plus = PureState::plus(vec![0]);
        assert!(matches!(
            Encoding::new(&PureState::zero(vec![0]), &plus),
            Err(Error::NonOrthogonal(_))
        ));
        assert!(encode_state(&s, &Encoding::ghz(8), LIMIT).is_err());
    }

    #[test]
    fn encoding_file_roundtrip() {
        let e = Encoding::w(3);
        let text = serde_json::to_string(&e.to_file()).unwrap();
        let back = Encoding::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.logical_one().fidelity(e.logical_one()).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn partition_validation() {
        assert!(BlockPartition::new(vec![vec![0, 1], vec![2, 3]], &[0, 1, 2, 3]).is_ok());
        assert!(BlockPartition::new(vec![vec![0, 1], vec![1, 2]], &[0, 1, 2]).is_err());
        assert!(BlockPartition::new(vec![vec![0, 1], vec![2]], &[0, 1, 2]).is_err());
        assert!(BlockPartition::new(vec![vec![0], vec![1]], &[0, 1, 2]).is_err());
    }

    #[test]
    fn ghz_logical_paulis_are_local() {
        for m in 2..=4 {
            let e = Encoding::ghz(m);
            for which in [Pauli::X, Pauli::Y, Pauli::Z] {
                let op = logical_pauli(&e, which).unwrap();
                assert_eq!(
                    op.locality,
                    Locality::Local,
                    "m = {m}, {which}: residual {}",
                    op.residual
                );
            }
        }
    }

    #[test]
    fn w_logical_x_is_not_local() {
        let op = logical_pauli(&Encoding::w(3), Pauli::X).unwrap();
        assert_eq!(op.locality, Locality::NotLocal);
        // logical Z on the W encoding is diagonal in the code space and local
        assert_eq!(
            logical_pauli(&Encoding::w(3), Pauli::Z).unwrap().locality,
            Locality::Local
        );
    }

    #[test]
    fn block_operator_matches_single_qubit_gate() {
        let s = PureState::random(3, &mut ChaCha8Rng::seed_from_u64(5));
        let x = DMatrix::from_fn(2, 2, |r, c| Pauli::X.matrix()[r][c]);
        let a = apply_block_operator(&s, &[1], &x).unwrap();
        let b = s.apply_single(1, &Pauli::X.matrix()).unwrap();
        assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn ghz_encoded_plus_measured_in_logical_z() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::from_amplitudes(
            vec![0],
            vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        )
        .unwrap();
        let e = Encoding::ghz(3);
        let (s, p) = encode_state(&plus, &e, LIMIT).unwrap();
        let block = p.blocks()[0].clone();
        let zero = e
            .encode_qubit(
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                block.clone(),
            )
            .unwrap();
        let one = e
            .encode_qubit(
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                block.clone(),
            )
            .unwrap();
        let m = logical_two_outcome_measurement(&s, &block, (&zero, &one)).unwrap();
        assert!(
            (m.probabilities[0] - 0.5).abs() < 1e-12 && (m.probabilities[1] - 0.5).abs() < 1e-12
        );
        assert!(matches!(
            logical_two_outcome_measurement(&s, &block, (&zero, &zero)),
            Err(Error::NonOrthogonal(_))
        ));
    }
}
