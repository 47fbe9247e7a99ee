//! Interval bounds on the Schmidt measure `log2` of the minimal number of product terms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{PureState, DEFAULT_RANK_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtOptions {
    pub max_terms: usize,
    pub restarts: usize,
    pub max_sweeps: usize,
    /// A fit counts when `||psi - fit|| < residual_tol`.
    pub residual_tol: f64,
    /// Fits whose largest product term exceeds this norm are rejected: they approximate
    /// the state as a limit of diverging terms rather than decomposing it.
    pub norm_cap: f64,
    pub seed: u64,
    pub size_limit: usize,
}

impl Default for SchmidtOptions {
    fn default() -> Self {
        Self {
            max_terms: 4,
            restarts: 16,
            max_sweeps: 2000,
            residual_tol: 1e-8,
            norm_cap: 1e3,
            seed: 0,
            size_limit: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtBounds {
    /// Largest `log2` Schmidt rank over all bipartitions.
    pub lower: f64,
    /// `log2 K` for the smallest fitted term count `K`; `None` when no fit up to
    /// `max_terms` succeeded (the upper bound is then unbounded as far as we know).
    pub upper: Option<f64>,
    pub exact: bool,
    pub terms: Option<usize>,
    /// Product terms of the fitted decomposition, one vector per qubit.
    pub decomposition: Option<Vec<Vec<[Complex64; 2]>>>,
}

/// Lower bound from bipartite Schmidt ranks and upper bound from an explicit product
/// decomposition found by alternating least squares.
pub fn schmidt_measure_bounds(s: &PureState, opts: &SchmidtOptions) -> Result<SchmidtBounds> {
    let n = s.n();
    if n > opts.size_limit {
        return Err(Error::SizeLimit {
            what: "Schmidt-measure fit",
            n,
            limit: opts.size_limit,
        });
    }
    if opts.max_terms == 0 || opts.restarts == 0 {
        return Err(Error::InvalidOperator(
            "Schmidt-measure options (max_terms, restarts >= 1)",
        ));
    }
    let max_rank = max_bipartite_rank(s);
    let lower = (max_rank as f64).log2();
    for k in max_rank.max(1)..=opts.max_terms {
        if let Some(terms) = fit_terms(s, k, opts) {
            let upper = (k as f64).log2();
            return Ok(SchmidtBounds {
                lower,
                upper: Some(upper),
                exact: k == max_rank,
                terms: Some(k),
                decomposition: Some(terms),
            });
        }
    }
    Ok(SchmidtBounds {
        lower,
        upper: None,
        exact: false,
        terms: None,
        decomposition: None,
    })
}

/// Largest Schmidt rank over all bipartitions (1 for fewer than two qubits).
pub fn max_bipartite_rank(s: &PureState) -> usize {
    let n = s.n();
    if n < 2 {
        return 1;
    }
    (1u64..1 << (n - 1))
        .map(|m| {
            s.spectrum_of_mask(m << 1)
                .iter()
                .filter(|&&l| l > DEFAULT_RANK_TOL)
                .count()
        })
        .max()
        .unwrap_or(1)
}

/// First restart (in index order) whose `k`-term fit succeeds.
fn fit_terms(s: &PureState, k: usize, opts: &SchmidtOptions) -> Option<Vec<Vec<[Complex64; 2]>>> {
    let n = s.n();
    if n == 0 {
        return Some(vec![Vec::new()]);
    }
    let target: Vec<Complex64> = s.amplitudes().to_vec();
    let results: Vec<Option<Vec<Vec<[Complex64; 2]>>>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (k as u64) << 32);
            rng.set_stream(r as u64);
            als(&target, n, k, &mut rng, opts)
        })
        .collect();
    results.into_iter().flatten().next()
}

fn cgauss(rng: &mut ChaCha8Rng) -> Complex64 {
    let mut g = || {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    Complex64::new(g(), g())
}

/// Evaluates `sum_r prod_j factors[j][x_j, r]` at every basis index.
fn reconstruct(factors: &[DMatrix<Complex64>], n: usize, k: usize) -> Vec<Complex64> {
    (0..1usize << n)
        .map(|x| {
            (0..k)
                .map(|r| {
                    (0..n)
                        .map(|j| factors[j][(x >> j & 1, r)])
                        .product::<Complex64>()
                })
                .sum()
        })
        .collect()
}

fn als(
    target: &[Complex64],
    n: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
    opts: &SchmidtOptions,
) -> Option<Vec<Vec<[Complex64; 2]>>> {
    let mut factors: Vec<DMatrix<Complex64>> = (0..n)
        .map(|_| DMatrix::from_fn(2, k, |_, _| cgauss(rng)))
        .collect();
    let rest = 1usize << (n - 1);
    let mut last_check = f64::INFINITY;
    for sweep in 0..opts.max_sweeps {
        for j in 0..n {
            // design matrix over the other qubits and the matching unfolding of the target
            let insert = |y: usize, b: usize| {
                let low = y & ((1 << j) - 1);
                ((y >> j) << (j + 1)) | (b << j) | low
            };
            let design = DMatrix::from_fn(rest, k, |y, r| {
                let x = insert(y, 0);
                (0..n)
                    .filter(|&i| i != j)
                    .map(|i| factors[i][(x >> i & 1, r)])
                    .product::<Complex64>()
            });
            let rhs = DMatrix::from_fn(rest, 2, |y, b| target[insert(y, b)]);
            let sol = design.svd(true, true).solve(&rhs, 1e-13).ok()?;
            factors[j] = sol.transpose();
        }
        balance(&mut factors, k);
        let largest = (0..k).map(|r| term_norm(&factors, r)).fold(0.0, f64::max);
        if !largest.is_finite() || largest > opts.norm_cap {
            return None;
        }
        let fit = reconstruct(&factors, n, k);
        let residual = fit
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual < opts.residual_tol {
            return Some(
                (0..k)
                    .map(|r| {
                        (0..n)
                            .map(|j| [factors[j][(0, r)], factors[j][(1, r)]])
                            .collect()
                    })
                    .collect(),
            );
        }
        // give up on a restart whose residual has stalled
        if sweep % 100 == 99 {
            if residual > 0.999 * last_check {
                return None;
            }
            last_check = residual;
        }
    }
    None
}

fn term_norm(factors: &[DMatrix<Complex64>], r: usize) -> f64 {
    factors.iter().map(|f| f.column(r).norm()).product()
}

/// Spreads each term's norm evenly over its factors.
fn balance(factors: &mut [DMatrix<Complex64>], k: usize) {
    let n = factors.len() as f64;
    for r in 0..k {
        let total = term_norm(factors, r);
        if total == 0.0 || !total.is_finite() {
            continue;
        }
        let each = total.powf(1.0 / n);
        for f in factors.iter_mut() {
            let c = f.column(r).norm();
            if c > 0.0 {
                f.column_mut(r).scale_mut(each / c);
            }
        }
    }
}
