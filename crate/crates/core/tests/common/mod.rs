#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symflow::{stationary_of, MarkovChain, Sft};

pub fn golden() -> Sft {
    Sft::new(2, &[vec![1, 1], vec![1, 0]]).unwrap()
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Irreducible 0-1 matrix: random entries plus a Hamiltonian cycle.
pub fn irreducible_from(k: usize, bits: &[bool], perm: &[usize]) -> Sft {
    let mut rows = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in 0..k {
            rows[i][j] = bits[i * k + j] as i64;
        }
    }
    for c in 0..k {
        rows[perm[c]][perm[(c + 1) % k]] = 1;
    }
    Sft::new(k, &rows).unwrap()
}

pub fn arb_irreducible(max_k: usize) -> impl Strategy<Value = Sft> {
    (1..=max_k).prop_flat_map(|k| {
        (
            prop::collection::vec(prop::bool::weighted(0.35), k * k),
            Just((0..k).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(bits, perm)| irreducible_from(k, &bits, &perm))
    })
}

/// Seeded random irreducible shift, for non-proptest suites.
pub fn random_irreducible(rng: &mut impl Rng, k: usize) -> Sft {
    let bits: Vec<bool> = (0..k * k).map(|_| rng.random_bool(0.35)).collect();
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    irreducible_from(k, &bits, &perm)
}

/// Random fully supported Markov chain on `s`.
pub fn random_chain(rng: &mut impl Rng, s: &Sft) -> MarkovChain {
    let rows: Vec<Vec<(usize, f64)>> = (0..s.k())
        .map(|i| {
            let w: Vec<f64> = s.successors(i).iter().map(|_| rng.random_range(0.05..1.0)).collect();
            let t: f64 = w.iter().sum();
            s.successors(i).iter().zip(w).map(|(&j, x)| (j, x / t)).collect()
        })
        .collect();
    let p = stationary_of(&rows).unwrap();
    MarkovChain::new(p, rows).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(s: &Sft) -> DMatrix<f64> {
    let k = s.k();
    DMatrix::from_fn(k, k, |i, j| if s.allowed(i, j) { 1.0 } else { 0.0 })
}

/// Perron root of a non-negative matrix from a dense Schur decomposition.
///
/// Plain QR can cycle forever on permutation-like matrices, so the
/// iteration count is capped and a failed run is retried on `M + cI`. For a
/// non-negative matrix the Perron root is also the eigenvalue of largest
/// real part, so shifting back by `c` recovers it.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    for c in [0.0, 0.5, 1.37, 3.1] {
        let shifted = m + DMatrix::<f64>::identity(n, n) * c;
        if let Some(schur) = nalgebra::Schur::try_new(shifted, f64::EPSILON, 10_000) {
            let top = schur.complex_eigenvalues().iter().map(|z| z.re).fold(f64::MIN, f64::max);
            return top - c;
        }
    }
    panic!("dense eigensolve did not converge")
}

/// Root `s` of `ρ([a_ij e^{-s φ(i)}]) = 1` by bisection, with the spectral
/// radius from a dense eigensolve. Valid for roofs depending on `x_0` only.
pub fn bowen_root(s: &Sft, phi: &[f64]) -> f64 {
    let a = dense(s);
    let rho = |x: f64| {
        let m = DMatrix::from_fn(s.k(), s.k(), |i, j| a[(i, j)] * (-x * phi[i]).exp());
        spectral_radius(&m)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while rho(hi) > 1.0 {
        hi *= 2.0;
    }
    if rho(lo) <= 1.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shannon entropy of the length-`n` cylinder distribution.
pub fn block_shannon(s: &Sft, mc: &MarkovChain, n: usize) -> f64 {
    s.admissible_words(n)
        .iter()
        .map(|w| mc.word_measure(w))
        .filter(|&m| m > 0.0)
        .map(|m| -m * m.ln())
        .sum()
}
