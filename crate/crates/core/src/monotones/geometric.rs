//! Geometric measure of entanglement by alternating single-qubit updates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::PureState;

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricOptions {
    pub restarts: usize,
    /// Stop a restart once a full sweep improves the overlap by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for GeometricOptions {
    fn default() -> Self {
        Self {
            restarts: 100,
            tol: 1e-12,
            max_sweeps: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricReport {
    /// `-log2` of the best squared overlap found (bits).
    pub value: f64,
    /// Best squared overlap with a product state.
    pub overlap: f64,
    /// Product state attaining `overlap`, one normalized vector per qubit in state order.
    pub witness: Vec<[Complex64; 2]>,
    /// Index of the restart that produced the witness.
    pub restart: usize,
    pub sweeps: usize,
    pub converged: bool,
}

/// Best-found `-log2 max |<phi|psi>|^2` over product states `phi`.
///
/// Each restart starts from random local vectors and repeatedly replaces one of them by
/// the normalized contraction of `psi` with all the others, which is the optimal choice
/// for that qubit. The result is the best fixed point found; the true maximum overlap
/// can only be larger.
pub fn geometric_measure(s: &PureState, opts: &GeometricOptions) -> Result<GeometricReport> {
    let norm = s.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    if opts.restarts == 0 || opts.tol <= 0.0 {
        return Err(Error::InvalidOperator(
            "geometric-measure options (restarts >= 1, tol > 0)",
        ));
    }
    let n = s.n();
    if n == 0 {
        return Ok(GeometricReport {
            value: 0.0,
            overlap: 1.0,
            witness: Vec::new(),
            restart: 0,
            sweeps: 0,
            converged: true,
        });
    }
    let amps = s.amplitudes();
    (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let start: Vec<[Complex64; 2]> = (0..n).map(|_| random_unit(&mut rng)).collect();
            see_saw(amps, start, r, opts)
        })
        .reduce_with(|a, b| {
            if b.overlap > a.overlap || (b.overlap == a.overlap && b.restart < a.restart) {
                b
            } else {
                a
            }
        })
        .ok_or(Error::InvalidOperator("restarts"))
}

fn random_unit(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let mut v = [0.0f64; 4].map(|_| gaussian(rng));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])]
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `<phi_{others}|psi>` as a vector on qubit `k`.
pub(crate) fn contract_except(
    amps: &[Complex64],
    phi: &[[Complex64; 2]],
    k: usize,
) -> [Complex64; 2] {
    let n = phi.len();
    let mut v = amps.to_vec();
    // high qubits first: each step halves the vector by folding its top bit
    for q in (k + 1..n).rev() {
        let half = v.len() / 2;
        let (c0, c1) = (phi[q][0].conj(), phi[q][1].conj());
        for i in 0..half {
            v[i] = c0 * v[i] + c1 * v[i + half];
        }
        v.truncate(half);
    }
    // then low qubits, folding bit 0 each time
    for p in &phi[..k] {
        let half = v.len() / 2;
        let (c0, c1) = (p[0].conj(), p[1].conj());
        for i in 0..half {
            v[i] = c0 * v[2 * i] + c1 * v[2 * i + 1];
        }
        v.truncate(half);
    }
    [v[0], v[1]]
}

fn see_saw(
    amps: &[Complex64],
    mut phi: Vec<[Complex64; 2]>,
    restart: usize,
    opts: &GeometricOptions,
) -> GeometricReport {
    let n = phi.len();
    let mut overlap = 0.0;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let before = overlap;
        for k in 0..n {
            let c = contract_except(amps, &phi, k);
            let norm = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
            if norm > 0.0 {
                phi[k] = [c[0] / norm, c[1] / norm];
            }
            overlap = norm * norm;
        }
        if overlap - before < opts.tol && sweeps > 1 {
            converged = true;
            break;
        }
    }
    let overlap = overlap.min(1.0);
    GeometricReport {
        value: -overlap.log2(),
        overlap,
        witness: phi,
        restart,
        sweeps,
        converged,
    }
}

/// Closed form `(N - 1) log2(N / (N - 1))` for the W state on `N >= 2` qubits.
pub fn w_state_geometric_measure(n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) * (n / (n - 1.0)).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> GeometricOptions {
        GeometricOptions {
            restarts: 20,
            ..GeometricOptions::default()
        }
    }

    #[test]
    fn contraction_matches_direct_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = PureState::random(4, &mut rng);
        let phi: Vec<_> = (0..4).map(|_| random_unit(&mut rng)).collect();
        let prod = PureState::product(s.labels().to_vec(), &phi).unwrap();
        let direct = prod.inner(&s).unwrap();
        for k in 0..4 {
            let c = contract_except(s.amplitudes(), &phi, k);
            let via = phi[k][0].conj() * c[0] + phi[k][1].conj() * c[1];
            assert!((via - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn product_states_have_zero_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi: Vec<_> = (0..3).map(|_| random_unit(&mut rng)).collect();
        let s = PureState::product(vec![0, 1, 2], &phi).unwrap();
        assert!(geometric_measure(&s, &quick()).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn ghz_and_w_values() {
        let g = geometric_measure(&PureState::ghz(4), &quick()).unwrap();
        assert!((g.value - 1.0).abs() < 1e-9);
        let w = geometric_measure(&PureState::w(3), &quick()).unwrap();
        assert!((w.value - 2.0 * (1.5f64).log2()).abs() < 1e-6);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = PureState::random(4, &mut ChaCha8Rng::seed_from_u64(9));
        let a = geometric_measure(&s, &quick()).unwrap();
        let b = geometric_measure(&s, &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_empty_restart_budget() {
        assert!(matches!(
            geometric_measure(
                &PureState::plus(vec![0]),
                &GeometricOptions {
                    restarts: 0,
                    ..quick()
                }
            ),
            Err(Error::InvalidOperator(_))
        ));
    }
}
