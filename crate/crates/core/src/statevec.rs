//! Dense pure-state simulation.
//!
//! Qubit at position `i` is bit `i` of the amplitude index. Labels travel with the
//! qubits: measuring or removing a qubit never renames the others.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::clifford::{dagger, mat_mul, Mat2};
use crate::graphstate::Pauli;

const NORM_TOL: f64 = 1e-10;

/// Default cutoff for counting a reduced-state eigenvalue as nonzero.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Probability below which a measurement branch is treated as impossible.
pub const IMPOSSIBLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<u32>,
    amps: Vec<Complex64>,
}

/// A split of the qubits into two nonempty, disjoint, covering sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub side_a: Vec<u32>,
    pub side_b: Vec<u32>,
}

impl Bipartition {
    /// Splits `all` into `side_a` and the rest.
    pub fn new(side_a: &[u32], all: &[u32]) -> Result<Self> {
        let mut a = side_a.to_vec();
        a.sort_unstable();
        if a.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBipartition(
                "duplicate label on side A".into(),
            ));
        }
        if let Some(&l) = a.iter().find(|l| !all.contains(l)) {
            return Err(Error::InvalidBipartition(format!(
                "label {l} not in system"
            )));
        }
        let b: Vec<u32> = all
            .iter()
            .copied()
            .filter(|l| a.binary_search(l).is_err())
            .collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidBipartition(
                "both sides must be nonempty".into(),
            ));
        }
        Ok(Self {
            side_a: a,
            side_b: b,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }
}

fn check_unitary(u: &Mat2) -> Result<()> {
    let p = mat_mul(u, &dagger(u));
    let id = Pauli::I.matrix();
    for i in 0..2 {
        for j in 0..2 {
            if (p[i][j] - id[i][j]).norm() > 1e-10 {
                return Err(Error::InvalidOperator("unitary"));
            }
        }
    }
    Ok(())
}

/// Shannon entropy (bits) of a probability spectrum.
pub fn spectrum_entropy(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&l| l > 1e-300)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

impl PureState {
    /// Wraps raw amplitudes; fails unless the vector is normalized within 1e-10.
    pub fn from_amplitudes(labels: Vec<u32>, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_amplitudes_unnormalized(labels, amps)?;
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Wraps raw amplitudes and rescales them to unit norm.
    pub fn normalized(labels: Vec<u32>, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_amplitudes_unnormalized(labels, amps)?;
        let norm = s.norm_sqr();
        if norm < IMPOSSIBLE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let r = norm.sqrt().recip();
        s.amps.iter_mut().for_each(|a| *a *= r);
        Ok(s)
    }

    fn from_amplitudes_unnormalized(labels: Vec<u32>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << labels.len() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                labels.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0]));
        }
        Ok(Self { labels, amps })
    }

    /// `|0...0>` on the given labels.
    pub fn zero(labels: Vec<u32>) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << labels.len()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { labels, amps }
    }

    /// `|+>^n` on the given labels.
    pub fn plus(labels: Vec<u32>) -> Self {
        let dim = 1usize << labels.len();
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Self {
            labels,
            amps: vec![a; dim],
        }
    }

    /// Product of single-qubit states given as `[c0, c1]` (normalized on construction).
    pub fn product(labels: Vec<u32>, factors: &[[Complex64; 2]]) -> Result<Self> {
        if factors.len() != labels.len() {
            return Err(Error::Dimension("one factor per qubit".into()));
        }
        let n = labels.len();
        let mut amps = vec![Complex64::new(1.0, 0.0); 1 << n];
        for (idx, a) in amps.iter_mut().enumerate() {
            for (q, f) in factors.iter().enumerate() {
                *a *= f[(idx >> q) & 1];
            }
        }
        Self::normalized(labels, amps)
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` on `0..n`.
    pub fn ghz(n: usize) -> Self {
        assert!(n >= 1);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = Complex64::new(r, 0.0);
        amps[(1 << n) - 1] = Complex64::new(r, 0.0);
        Self {
            labels: (0..n as u32).collect(),
            amps,
        }
    }

    /// Equal superposition of the `n` single-excitation strings on `0..n`.
    pub fn w(n: usize) -> Self {
        assert!(n >= 1);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let r = (n as f64).sqrt().recip();
        for q in 0..n {
            amps[1 << q] = Complex64::new(r, 0.0);
        }
        Self {
            labels: (0..n as u32).collect(),
            amps,
        }
    }

    /// Haar-like random state (normalized complex Gaussian vector).
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| {
                // Box-Muller
                let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
                let r = (-2.0 * u1.ln()).sqrt();
                let t = std::f64::consts::TAU * u2;
                let (v1, v2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
                let r2 = (-2.0 * v1.ln()).sqrt();
                let t2 = std::f64::consts::TAU * v2;
                Complex64::new(r * t.cos(), r2 * t2.cos())
            })
            .collect();
        Self::normalized((0..n as u32).collect(), amps).expect("random vector is nonzero")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn position(&self, label: u32) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        let other = other.reordered(&self.labels)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<a|b>|^2`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// True iff the states agree up to a global phase (fidelity `>= 1 - 1e-9`).
    pub fn equal_up_to_phase(&self, other: &PureState) -> Result<bool> {
        Ok(self.fidelity(other)? >= 1.0 - 1e-9)
    }

    /// Same state with qubits permuted into the given label order.
    pub fn reordered(&self, order: &[u32]) -> Result<PureState> {
        if order.len() != self.n() {
            return Err(Error::Dimension(format!(
                "label sets differ: {:?} vs {:?}",
                self.labels, order
            )));
        }
        if order == self.labels.as_slice() {
            return Ok(self.clone());
        }
        let src_pos: Vec<usize> = order
            .iter()
            .map(|&l| self.position(l))
            .collect::<Result<_>>()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, a) in amps.iter_mut().enumerate() {
            let mut src = 0usize;
            for (new_q, &old_q) in src_pos.iter().enumerate() {
                src |= ((idx >> new_q) & 1) << old_q;
            }
            *a = self.amps[src];
        }
        Ok(PureState {
            labels: order.to_vec(),
            amps,
        })
    }

    /// `self ⊗ other`; label sets must be disjoint. `self` occupies the low positions.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if let Some(&l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(Error::DuplicateLabel(l));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let shift = self.n();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << labels.len()];
        for (j, b) in other.amps.iter().enumerate() {
            for (i, a) in self.amps.iter().enumerate() {
                amps[(j << shift) | i] = a * b;
            }
        }
        Ok(PureState { labels, amps })
    }

    /// Appends a disentangled `|0>` qubit.
    pub fn with_zero_qubit(&self, label: u32) -> Result<PureState> {
        self.tensor(&PureState::zero(vec![label]))
    }

    pub fn apply_single(&self, label: u32, u: &Mat2) -> Result<PureState> {
        check_unitary(u)?;
        let mut out = self.clone();
        out.apply_single_in_place(self.position(label)?, u);
        Ok(out)
    }

    pub(crate) fn apply_single_in_place(&mut self, q: usize, u: &Mat2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    pub fn apply_cz(&self, a: u32, b: u32) -> Result<PureState> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        if pa == pb {
            return Err(Error::Dimension("CZ needs two distinct qubits".into()));
        }
        let mut out = self.clone();
        out.apply_cz_in_place(pa, pb);
        Ok(out)
    }

    pub(crate) fn scaled(mut self, c: f64) -> PureState {
        self.amps.iter_mut().for_each(|a| *a *= c);
        self
    }

    pub(crate) fn apply_cz_in_place(&mut self, pa: usize, pb: usize) {
        let m = (1usize << pa) | (1usize << pb);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *a = -*a;
            }
        }
    }

    /// Applies a two-qubit unitary given in the basis `|q_a q_b>` with `q_a` the high bit.
    pub fn apply_two(&self, a: u32, b: u32, u: &[[Complex64; 4]; 4]) -> Result<PureState> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        if pa == pb {
            return Err(Error::Dimension(
                "two-qubit gate needs distinct qubits".into(),
            ));
        }
        let (ba, bb) = (1usize << pa, 1usize << pb);
        let mut out = self.clone();
        for i in 0..self.amps.len() {
            if i & (ba | bb) != 0 {
                continue;
            }
            let idx = [i, i | bb, i | ba, i | ba | bb];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                out.amps[k] = (0..4).map(|c| u[r][c] * v[c]).sum();
            }
        }
        Ok(out)
    }

    /// Contracts qubit `label` against `<v|` (v need not be normalized) and removes it.
    pub(crate) fn contract_qubit(&self, label: u32, v: [Complex64; 2]) -> Result<PureState> {
        let q = self.position(label)?;
        let bit = 1usize << q;
        let low = bit - 1;
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for j in 0..self.amps.len() / 2 {
            let i0 = (j & low) | ((j & !low) << 1);
            amps.push(v[0].conj() * self.amps[i0] + v[1].conj() * self.amps[i0 | bit]);
        }
        let mut labels = self.labels.clone();
        labels.remove(q);
        Ok(PureState { labels, amps })
    }

    /// Applies a rank-1 projector to one qubit. Returns the branch probability and the
    /// renormalized state of the remaining qubits.
    pub fn project_measure(&self, label: u32, projector: &Mat2) -> Result<(f64, PureState)> {
        let v = rank_one_vector(projector)?;
        let rest = self.contract_qubit(label, v)?;
        let p = rest.norm_sqr();
        if p <= IMPOSSIBLE_TOL {
            return Err(Error::ImpossibleOutcome {
                step: 0,
                outcome: 0,
                probability: p,
            });
        }
        let r = p.sqrt().recip();
        let amps = rest.amps.iter().map(|a| a * r).collect();
        Ok((
            p,
            PureState {
                labels: rest.labels,
                amps,
            },
        ))
    }

    /// Probability of projecting `label` onto the normalized vector `v`.
    pub fn branch_probability(&self, label: u32, v: [Complex64; 2]) -> Result<f64> {
        Ok(self.contract_qubit(label, v)?.norm_sqr())
    }

    /// Projects a block of qubits onto `block_state` (labels in the block state's order
    /// are mapped positionally onto `block`). Returns probability and remainder.
    pub fn project_block(
        &self,
        block: &[u32],
        block_state: &PureState,
    ) -> Result<(f64, PureState)> {
        if block.len() != block_state.n() {
            return Err(Error::Dimension(
                "block size differs from projector arity".into(),
            ));
        }
        let rest_labels: Vec<u32> = self
            .labels
            .iter()
            .copied()
            .filter(|l| !block.contains(l))
            .collect();
        if rest_labels.len() + block.len() != self.n() {
            return Err(Error::InvalidBipartition(
                "block labels not all in state".into(),
            ));
        }
        let mut order = block.to_vec();
        order.extend_from_slice(&rest_labels);
        let s = self.reordered(&order)?;
        let bdim = 1usize << block.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << rest_labels.len()];
        for (r, out) in amps.iter_mut().enumerate() {
            *out = (0..bdim)
                .map(|b| block_state.amps[b].conj() * s.amps[(r << block.len()) | b])
                .sum();
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p <= IMPOSSIBLE_TOL {
            return Ok((
                p,
                PureState {
                    labels: rest_labels,
                    amps,
                },
            ));
        }
        let r = p.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= r);
        Ok((
            p,
            PureState {
                labels: rest_labels,
                amps,
            },
        ))
    }

    /// Labels to position mask.
    pub fn mask_of(&self, labels: &[u32]) -> Result<u64> {
        let mut m = 0u64;
        for &l in labels {
            m |= 1 << self.position(l)?;
        }
        Ok(m)
    }

    /// Descending eigenvalues of the reduced state on `side_a`.
    pub fn schmidt_spectrum(&self, p: &Bipartition) -> Result<Vec<f64>> {
        self.validate(p)?;
        Ok(self.spectrum_of_mask(self.mask_of(&p.side_a)?))
    }

    fn validate(&self, p: &Bipartition) -> Result<()> {
        let mut all: Vec<u32> = p.side_a.iter().chain(&p.side_b).copied().collect();
        all.sort_unstable();
        let mut mine = self.labels.clone();
        mine.sort_unstable();
        if all != mine || p.side_a.is_empty() || p.side_b.is_empty() {
            return Err(Error::InvalidBipartition(format!(
                "{:?} | {:?} does not split {:?}",
                p.side_a, p.side_b, self.labels
            )));
        }
        Ok(())
    }

    /// Spectrum across the cut given by a position mask (either side may be empty).
    pub(crate) fn spectrum_of_mask(&self, mask: u64) -> Vec<f64> {
        let n = self.n();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let a_mask = mask & full;
        let b_mask = full & !a_mask;
        let (rows_mask, cols_mask) = if a_mask.count_ones() <= b_mask.count_ones() {
            (a_mask, b_mask)
        } else {
            (b_mask, a_mask)
        };
        if rows_mask == 0 {
            return vec![1.0];
        }
        let row_bits: Vec<usize> = (0..n).filter(|q| rows_mask >> q & 1 == 1).collect();
        let col_bits: Vec<usize> = (0..n).filter(|q| cols_mask >> q & 1 == 1).collect();
        let (r, c) = (1usize << row_bits.len(), 1usize << col_bits.len());
        let scatter = |k: usize, bits: &[usize]| {
            bits.iter()
                .enumerate()
                .fold(0usize, |acc, (i, &b)| acc | (((k >> i) & 1) << b))
        };
        let row_idx: Vec<usize> = (0..r).map(|k| scatter(k, &row_bits)).collect();
        let col_idx: Vec<usize> = (0..c).map(|k| scatter(k, &col_bits)).collect();
        let m = DMatrix::from_fn(r, c, |i, j| self.amps[row_idx[i] | col_idx[j]]);
        let mut spec: Vec<f64> = m
            .svd(false, false)
            .singular_values
            .iter()
            .map(|s| s * s)
            .collect();
        spec.sort_by(|a, b| b.total_cmp(a));
        spec
    }

    /// Von Neumann entropy (bits) of the reduced state on `side_a`.
    pub fn entropy(&self, p: &Bipartition) -> Result<f64> {
        Ok(spectrum_entropy(&self.schmidt_spectrum(p)?))
    }

    /// Number of reduced-state eigenvalues above `tol`.
    pub fn schmidt_rank(&self, p: &Bipartition, tol: f64) -> Result<usize> {
        if tol <= 0.0 {
            return Err(Error::InvalidOperator("tolerance (must be positive)"));
        }
        Ok(self
            .schmidt_spectrum(p)?
            .iter()
            .filter(|&&l| l > tol)
            .count())
    }

    /// Reduced density matrix of one qubit.
    pub fn single_qubit_density(&self, label: u32) -> Result<Mat2> {
        let q = self.position(label)?;
        let bit = 1usize << q;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        Ok(rho)
    }

    /// Expectation value of a Pauli string given per label.
    pub fn pauli_expectation(&self, ops: &[(u32, Pauli)]) -> Result<Complex64> {
        let mut s = self.clone();
        for &(l, p) in ops {
            let q = s.position(l)?;
            s.apply_single_in_place(q, &p.matrix());
        }
        self.inner(&s)
    }

    /// Amplitude map keyed by bitstring (character `i` is the qubit at position `i`).
    pub fn to_bitstring_map(&self, tol: f64) -> Vec<(String, f64, f64)> {
        let n = self.n();
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, a)| {
                (
                    (0..n)
                        .map(|q| if i >> q & 1 == 1 { '1' } else { '0' })
                        .collect(),
                    a.re,
                    a.im,
                )
            })
            .collect()
    }

    /// Inverse of [`to_bitstring_map`](Self::to_bitstring_map); the result is normalized.
    pub fn from_bitstring_map(labels: Vec<u32>, entries: &[(String, f64, f64)]) -> Result<Self> {
        let n = labels.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let mut seen = HashSet::new();
        for (bits, re, im) in entries {
            if bits.len() != n {
                return Err(Error::Parse(format!(
                    "bitstring {bits:?} has wrong length (expected {n})"
                )));
            }
            let mut idx = 0usize;
            for (q, ch) in bits.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => idx |= 1 << q,
                    _ => return Err(Error::Parse(format!("bad character {ch:?} in bitstring"))),
                }
            }
            if !seen.insert(idx) {
                return Err(Error::Parse(format!("bitstring {bits} listed twice")));
            }
            amps[idx] = Complex64::new(*re, *im);
        }
        Self::normalized(labels, amps)
    }
}

/// For a rank-1 Hermitian idempotent `P = |v><v|`, returns `v`.
pub(crate) fn rank_one_vector(p: &Mat2) -> Result<[Complex64; 2]> {
    let herm = (p[0][1] - p[1][0].conj()).norm() < 1e-10
        && p[0][0].im.abs() < 1e-10
        && p[1][1].im.abs() < 1e-10;
    let p2 = mat_mul(p, p);
    let idem = (0..2).all(|i| (0..2).all(|j| (p2[i][j] - p[i][j]).norm() < 1e-10));
    let trace = p[0][0].re + p[1][1].re;
    if !herm || !idem || (trace - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidOperator("rank-1 projector"));
    }
    // pick the larger column for numerical stability
    let col = if p[0][0].re >= p[1][1].re { 0 } else { 1 };
    let v = [p[0][col], p[1][col]];
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    Ok([v[0] / norm, v[1] / norm])
}

/// Projector `|v><v|` for a (not necessarily normalized) vector.
pub fn projector_from_vector(v: [Complex64; 2]) -> Mat2 {
    let norm = v[0].norm_sqr() + v[1].norm_sqr();
    let mut p = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = v[i] * v[j].conj() / norm;
        }
    }
    p
}
