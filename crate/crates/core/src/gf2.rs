//! Bit-packed matrices over GF(2).
//!
//! Rows are stored as contiguous runs of `u64` words. Rank is computed by
//! Gaussian elimination on a scratch copy, so every operation here is
//! value-semantic.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD)
}

/// Dense binary matrix with row-major packed storage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set_unchecked(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested rows of booleans. All rows must have the same length.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                m.set_unchecked(i, j, b);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::OutOfBounds {
                index: (i, j),
                shape: (self.rows, self.cols),
            });
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Result<bool> {
        self.check(i, j)?;
        Ok(self.get_unchecked(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) -> Result<()> {
        self.check(i, j)?;
        self.set_unchecked(i, j, value);
        Ok(())
    }

    #[inline]
    pub(crate) fn get_unchecked(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_unchecked(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub(crate) fn toggle_unchecked(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    /// Number of ones in row `i`.
    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// Column indices of the ones in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.row_words(i).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(k * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                t.set_unchecked(j, i, true);
            }
        }
        t
    }

    /// Row `i` ^= row `src`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) -> Result<()> {
        if src >= self.rows || dst >= self.rows {
            return Err(Error::OutOfBounds {
                index: (src.max(dst), 0),
                shape: (self.rows, self.cols),
            });
        }
        if src != dst {
            for k in 0..self.stride {
                let v = self.bits[src * self.stride + k];
                self.bits[dst * self.stride + k] ^= v;
            }
        } else {
            self.bits[dst * self.stride..(dst + 1) * self.stride].fill(0);
        }
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.rows || b >= self.rows {
            return Err(Error::OutOfBounds {
                index: (a.max(b), 0),
                shape: (self.rows, self.cols),
            });
        }
        for k in 0..self.stride {
            self.bits.swap(a * self.stride + k, b * self.stride + k);
        }
        Ok(())
    }

    /// Entry `(i, j)` of the result is entry `(row_set[i], col_set[j])` of `self`.
    pub fn submatrix(&self, row_set: &[usize], col_set: &[usize]) -> Result<Self> {
        if let Some(&r) = row_set.iter().find(|&&r| r >= self.rows) {
            return Err(Error::OutOfBounds {
                index: (r, 0),
                shape: (self.rows, self.cols),
            });
        }
        if let Some(&c) = col_set.iter().find(|&&c| c >= self.cols) {
            return Err(Error::OutOfBounds {
                index: (0, c),
                shape: (self.rows, self.cols),
            });
        }
        let mut out = Self::zeros(row_set.len(), col_set.len());
        for (i, &r) in row_set.iter().enumerate() {
            for (j, &c) in col_set.iter().enumerate() {
                if self.get_unchecked(r, c) {
                    out.set_unchecked(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Removes row and column `v` from a square matrix, shifting later indices down.
    pub(crate) fn remove_row_col(&mut self, v: usize) {
        let n = self.rows;
        debug_assert_eq!(n, self.cols);
        let mut out = Self::zeros(n - 1, n - 1);
        let mut oi = 0;
        for i in 0..n {
            if i == v {
                continue;
            }
            let src = &self.bits[i * self.stride..(i + 1) * self.stride];
            let dst = &mut out.bits[oi * out.stride..(oi + 1) * out.stride];
            // copy bits below v verbatim, shift bits above v down by one
            for (k, d) in dst.iter_mut().enumerate() {
                let lo_word = src.get(k).copied().unwrap_or(0);
                let hi_word = src.get(k + 1).copied().unwrap_or(0);
                let shifted = (lo_word >> 1) | (hi_word << 63);
                let base = k * WORD;
                *d = if base + WORD <= v {
                    lo_word
                } else if base > v {
                    shifted
                } else {
                    let keep = (1u64 << (v - base)) - 1;
                    (lo_word & keep) | (shifted & !keep)
                };
            }
            oi += 1;
        }
        // clear any stray bits beyond the new column count
        let tail = (n - 1) % WORD;
        if tail != 0 {
            for i in 0..n - 1 {
                out.bits[i * out.stride + out.stride - 1] &= (1u64 << tail) - 1;
            }
        }
        *self = out;
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get_unchecked(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Dimension of the GF(2) row space of `m`. Empty matrices have rank 0.
pub fn rank_gf2(m: &BitMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut work = m.bits.clone();
    let stride = m.stride;
    let mut rank = 0;
    for col in 0..m.cols {
        let (wi, mask) = (col / WORD, 1u64 << (col % WORD));
        let Some(pivot) = (rank..m.rows).find(|&r| work[r * stride + wi] & mask != 0) else {
            continue;
        };
        if pivot != rank {
            for k in 0..stride {
                work.swap(pivot * stride + k, rank * stride + k);
            }
        }
        for r in rank + 1..m.rows {
            if work[r * stride + wi] & mask != 0 {
                for k in wi..stride {
                    let v = work[rank * stride + k];
                    work[r * stride + k] ^= v;
                }
            }
        }
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    rank
}

/// Rank of a small matrix given as row bitmasks (at most 64 columns).
pub(crate) fn rank_of_rows(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot_row = rows[i];
        if pivot_row == 0 {
            continue;
        }
        rank += 1;
        let low = pivot_row & pivot_row.wrapping_neg();
        for r in rows.iter_mut().skip(i + 1) {
            if *r & low != 0 {
                *r ^= pivot_row;
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set_unchecked(i, j, rng.gen_bool(0.5));
            }
        }
        m
    }

    /// Span size oracle: XOR every subset of rows and count distinct results.
    fn span_rank(m: &BitMatrix) -> usize {
        let rows: Vec<Vec<u64>> = (0..m.rows()).map(|i| m.row_words(i).to_vec()).collect();
        let mut seen = std::collections::HashSet::new();
        for subset in 0u32..(1 << m.rows()) {
            let mut acc = vec![0u64; m.stride];
            for (i, row) in rows.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    for (a, r) in acc.iter_mut().zip(row) {
                        *a ^= r;
                    }
                }
            }
            seen.insert(acc);
        }
        seen.len().trailing_zeros() as usize
    }

    #[test]
    fn identity_and_all_ones() {
        assert_eq!(rank_gf2(&BitMatrix::identity(3)), 3);
        let ones = BitMatrix::from_rows(&vec![vec![true; 4]; 4]).unwrap();
        assert_eq!(rank_gf2(&ones), 1);
    }

    #[test]
    fn five_by_five_against_span() {
        // Frozen instance; rank 3 from the span oracle (row 4 = row 0 ^ row 1 = row 2 ^ row 3).
        let rows = [
            [1, 0, 1, 1, 0],
            [0, 1, 1, 0, 1],
            [1, 1, 0, 0, 0],
            [0, 0, 0, 1, 1],
            [1, 1, 0, 1, 1],
        ];
        let m = BitMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&b| b == 1).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(span_rank(&m), 3);
        assert_eq!(rank_gf2(&m), 3);
    }

    #[test]
    fn empty_matrices_have_rank_zero() {
        assert_eq!(rank_gf2(&BitMatrix::zeros(0, 5)), 0);
        assert_eq!(rank_gf2(&BitMatrix::zeros(5, 0)), 0);
        let m = BitMatrix::identity(4);
        let s = m.submatrix(&[], &[0, 1]).unwrap();
        assert_eq!((s.rows(), s.cols()), (0, 2));
        assert_eq!(rank_gf2(&s), 0);
    }

    #[test]
    fn submatrix_of_path_adjacency() {
        let mut adj = BitMatrix::zeros(4, 4);
        for (u, v) in [(0, 1), (1, 2), (2, 3)] {
            adj.set(u, v, true).unwrap();
            adj.set(v, u, true).unwrap();
        }
        let s = adj.submatrix(&[0, 1], &[2, 3]).unwrap();
        assert!(s.get(1, 0).unwrap());
        assert_eq!(s.row_weight(0) + s.row_weight(1), 1);
        assert_eq!(adj.submatrix(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), adj);
        assert!(matches!(
            adj.submatrix(&[4], &[0]),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn out_of_bounds_access_is_an_error() {
        let mut m = BitMatrix::zeros(2, 3);
        assert!(m.get(2, 0).is_err());
        assert!(m.set(0, 3, true).is_err());
    }

    #[test]
    fn agrees_with_span_oracle_on_random_small_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1200 {
            let r = rng.gen_range(0..=8);
            let c = rng.gen_range(0..=8);
            let m = random_matrix(&mut rng, r, c);
            assert_eq!(rank_gf2(&m), span_rank(&m), "{m:?}");
        }
    }

    #[test]
    fn remove_row_col_across_word_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 64, 65, 130] {
            let m = random_matrix(&mut rng, n, n);
            for v in [0, n / 2, n - 1] {
                let mut got = m.clone();
                got.remove_row_col(v);
                let keep: Vec<usize> = (0..n).filter(|&i| i != v).collect();
                assert_eq!(got, m.submatrix(&keep, &keep).unwrap(), "n={n} v={v}");
            }
        }
    }

    #[test]
    fn rank_of_rows_matches_packed_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = random_matrix(&mut rng, 6, 7);
            let mut rows: Vec<u64> = (0..6).map(|i| m.row_words(i)[0]).collect();
            assert_eq!(rank_of_rows(&mut rows), rank_gf2(&m));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = BitMatrix> {
            (0usize..=12, 0usize..=12).prop_flat_map(|(r, c)| {
                proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                    let mut m = BitMatrix::zeros(r, c);
                    for i in 0..r {
                        for j in 0..c {
                            m.set_unchecked(i, j, bits[i * c + j]);
                        }
                    }
                    m
                })
            })
        }

        proptest! {
            #[test]
            fn rank_is_transpose_invariant(m in matrix()) {
                prop_assert_eq!(rank_gf2(&m), rank_gf2(&m.transpose()));
                prop_assert!(rank_gf2(&m) <= m.rows().min(m.cols()));
            }

            #[test]
            fn rank_is_invariant_under_row_operations(
                m in matrix(),
                ops in proptest::collection::vec((any::<bool>(), 0usize..12, 0usize..12), 0..20),
            ) {
                let before = rank_gf2(&m);
                let mut w = m.clone();
                if w.rows() > 1 {
                    for (swap, a, b) in ops {
                        let (a, b) = (a % w.rows(), b % w.rows());
                        if swap {
                            w.swap_rows(a, b).unwrap();
                        } else if a != b {
                            w.xor_row_into(a, b).unwrap();
                        }
                    }
                }
                prop_assert_eq!(rank_gf2(&w), before);
            }
        }
    }
}
