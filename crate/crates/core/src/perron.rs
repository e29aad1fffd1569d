//! Perron–Frobenius eigendata of irreducible non-negative matrices.
//!
//! The dominant eigenpair is found by power iteration on `M + I`. The shift
//! makes every irreducible matrix primitive, so periodic shifts converge too.
//! Convergence is certified with Collatz–Wielandt bounds: for a positive
//! vector `x`, `min_i (Mx)_i / x_i <= lambda <= max_i (Mx)_i / x_i`.

use crate::error::{Error, Result};
use crate::sft::{is_strongly_connected, Sft};

/// Sparse non-negative matrix as per-row `(column, value)` lists.
pub type SparseRows = Vec<Vec<(usize, f64)>>;

const REL_TOL: f64 = 1e-14;
const MAX_ITER: usize = 1_000_000;
/// Accept a rounding-limited gap after this many iterations without progress.
const STALL_WINDOW: usize = 10_000;
const STALL_TOL: f64 = 1e-11;

/// Dominant eigenvalue with strictly positive left and right eigenvectors,
/// normalized so that `sum(right) = 1` and `sum(left_i * right_i) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronData {
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl PerronData {
    pub fn k(&self) -> usize {
        self.right.len()
    }

    /// Max relative residual of `uA = lambda u` and `Av = lambda v` for the
    /// matrix given in sparse form.
    pub fn residual(&self, rows: &[Vec<(usize, f64)>]) -> f64 {
        let k = self.k();
        let mut av = vec![0.0; k];
        let mut ua = vec![0.0; k];
        for (i, row) in rows.iter().enumerate() {
            for &(j, a) in row {
                av[i] += a * self.right[j];
                ua[j] += self.left[i] * a;
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..k {
            worst = worst.max((av[i] - self.lambda * self.right[i]).abs() / (self.lambda * self.right[i]));
            worst = worst.max((ua[i] - self.lambda * self.left[i]).abs() / (self.lambda * self.left[i]));
        }
        worst
    }
}

/// The 0-1 matrix of `s` in sparse form.
pub fn sft_rows(s: &Sft) -> SparseRows {
    (0..s.k())
        .map(|i| s.successors(i).iter().map(|&j| (j, 1.0)).collect())
        .collect()
}

/// Perron data of the transition matrix of an irreducible shift.
pub fn perron_data(s: &Sft) -> Result<PerronData> {
    if !s.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    perron_weighted(&sft_rows(s))
}

/// `log lambda`, the topological entropy of the shift.
pub fn top_entropy_sft(s: &Sft) -> Result<f64> {
    Ok(perron_data(s)?.lambda.ln())
}

/// Perron data of an irreducible non-negative matrix in sparse form.
pub fn perron_weighted(rows: &[Vec<(usize, f64)>]) -> Result<PerronData> {
    let k = rows.len();
    let mut adj = vec![Vec::new(); k];
    for (i, row) in rows.iter().enumerate() {
        for &(j, a) in row {
            if j >= k {
                return Err(Error::SymbolOutOfRange { symbol: j, k });
            }
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::ParameterOutOfRange {
                    name: "matrix entry",
                    value: a,
                });
            }
            if a > 0.0 {
                adj[i].push(j);
            }
        }
    }
    if !is_strongly_connected(&adj) {
        return Err(Error::NotIrreducible);
    }

    let (lambda, mut right) = dominant_vector(rows)?;
    let transposed = transpose(rows);
    let (_, mut left) = dominant_vector(&transposed)?;

    let sum_right: f64 = right.iter().sum();
    right.iter_mut().for_each(|x| *x /= sum_right);
    let dot: f64 = left.iter().zip(&right).map(|(u, v)| u * v).sum();
    left.iter_mut().for_each(|x| *x /= dot);

    Ok(PerronData {
        lambda,
        left,
        right,
    })
}

pub(crate) fn transpose(rows: &[Vec<(usize, f64)>]) -> SparseRows {
    let mut t = vec![Vec::new(); rows.len()];
    for (i, row) in rows.iter().enumerate() {
        for &(j, a) in row {
            t[j].push((i, a));
        }
    }
    t
}

fn mul(rows: &[Vec<(usize, f64)>], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|row| row.iter().map(|&(j, a)| a * x[j]).sum())
        .collect()
}

/// Power iteration on `M + I`; returns the eigenvalue of `M` and a positive
/// right eigenvector normalized to unit sum.
fn dominant_vector(rows: &[Vec<(usize, f64)>]) -> Result<(f64, Vec<f64>)> {
    let k = rows.len();
    let mut x = vec![1.0 / k as f64; k];
    let mut best_gap = f64::INFINITY;
    let mut last_improvement = 0;

    for it in 0..MAX_ITER {
        let mx = mul(rows, &x);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut y = Vec::with_capacity(k);
        for i in 0..k {
            let yi = mx[i] + x[i];
            let r = yi / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
            y.push(yi);
        }
        let sum: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= sum);
        x = y;

        let gap = (hi - lo) / hi;
        if gap <= REL_TOL {
            break;
        }
        if gap < best_gap * (1.0 - 1e-3) {
            best_gap = gap;
            last_improvement = it;
        } else if it - last_improvement > STALL_WINDOW && gap <= STALL_TOL {
            break;
        }
        if it + 1 == MAX_ITER {
            return Err(Error::NoConvergence { iterations: MAX_ITER });
        }
    }

    let mx = mul(rows, &x);
    let lambda = mx.iter().sum::<f64>() / x.iter().sum::<f64>();
    Ok((lambda, x))
}
