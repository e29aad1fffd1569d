//! A continuous family of Markov measures joining a zero-entropy measure to
//! the Parry measure, and a solver that hits any entropy in between.

use crate::error::{Error, Result};
use crate::markov::{parry_measure, stationary_of, MarkovChain};
use crate::perron::SparseRows;
use crate::sft::Sft;

/// Below this the stationary vector of `P(t)` is no longer unique, so
/// `p(0)` is taken as the stationary vector at this parameter.
pub const T_LIMIT: f64 = 1e-12;

const GRID_START: usize = 64;
const GRID_MAX: usize = 4096;

/// The path `t -> (p(t), P(t))` built on a base chain. For `j != l(i)` the
/// transition `i -> j` is scaled by `t`; the removed mass goes to `l(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPath {
    base: MarkovChain,
    l: Vec<usize>,
}

impl EntropyPath {
    /// Path over `base`, which must be supported on `s`. `l(i)` is the
    /// smallest successor of `i` in `s`.
    pub fn new(s: &Sft, base: MarkovChain) -> Result<Self> {
        base.check_support(s)?;
        let l = (0..s.k()).map(|i| s.successors(i)[0]).collect();
        Ok(EntropyPath { base, l })
    }

    /// Path ending at the Parry measure of `s`.
    pub fn from_parry(s: &Sft) -> Result<Self> {
        Self::new(s, parry_measure(s)?)
    }

    pub fn base(&self) -> &MarkovChain {
        &self.base
    }

    pub fn l(&self) -> &[usize] {
        &self.l
    }

    pub fn matrix(&self, t: f64) -> Result<SparseRows> {
        check_t(t)?;
        let rows = (0..self.base.k())
            .map(|i| {
                let li = self.l[i];
                if t == 0.0 {
                    return vec![(li, 1.0)];
                }
                let mut kept = self.base.prob(i, li);
                let mut moved = 0.0;
                let mut row: Vec<(usize, f64)> = Vec::with_capacity(self.base.row(i).len() + 1);
                for &(j, p) in self.base.row(i) {
                    if j != li {
                        moved += p;
                        row.push((j, t * p));
                    }
                }
                kept += (1.0 - t) * moved;
                let at = row.partition_point(|e| e.0 < li);
                row.insert(at, (li, kept));
                row.retain(|e| e.1 > 0.0);
                row
            })
            .collect();
        Ok(rows)
    }

    /// `(p(t), P(t))`. For `t > 0` the chain is irreducible on the support of
    /// the base, so `p(t)` is its unique stationary vector; at `t = 1` the
    /// base itself is returned.
    pub fn measure(&self, t: f64) -> Result<MarkovChain> {
        let rows = self.matrix(t)?;
        if t == 1.0 {
            return Ok(self.base.clone());
        }
        let p = if t >= T_LIMIT {
            stationary_of(&rows)?
        } else {
            stationary_of(&self.matrix(T_LIMIT)?)?
        };
        MarkovChain::new(p, rows)
    }

    pub fn entropy(&self, t: f64) -> Result<f64> {
        Ok(self.measure(t)?.entropy())
    }

    /// Some `t` in `(0, 1]` with `|h(t) - h| <= tol`.
    pub fn solve(&self, h: f64, tol: f64) -> Result<f64> {
        let top = self.entropy(1.0)?;
        if !(h > 0.0) || !(h < top - tol) {
            return Err(Error::TargetOutOfRange {
                target: h,
                top_lo: top,
                top_hi: top,
            });
        }
        solve_ivt(|t| self.entropy(t), T_LIMIT, 1.0, h, tol)
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name: "t", value: t })
    }
}

/// Finds `x` in `[a, b]` with `|f(x) - target| <= tol` for continuous `f`.
///
/// `f` need not be monotone. A uniform grid (64 intervals, doubled up to
/// 4096) is scanned for a sign change of `f - target`; the bracket with the
/// largest left endpoint wins and is bisected until the value tolerance is
/// met or the bracket cannot be split further in floating point.
pub fn solve_ivt<F>(mut f: F, a: f64, b: f64, target: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g = |x: f64| -> Result<f64> { Ok(f(x)? - target) };
    let mut grid = GRID_START;
    let (mut lo, mut hi, mut g_lo, mut g_hi);
    loop {
        let xs: Vec<f64> = (0..=grid)
            .map(|i| if i == grid { b } else { a + (b - a) * i as f64 / grid as f64 })
            .collect();
        let mut gs = Vec::with_capacity(xs.len());
        for &x in &xs {
            gs.push(g(x)?);
        }
        let mut found = None;
        for i in (0..=grid).rev() {
            if gs[i].abs() <= tol {
                return Ok(xs[i]);
            }
            if i > 0 && (gs[i - 1] < 0.0) != (gs[i] < 0.0) {
                found = Some(i - 1);
                break;
            }
        }
        if let Some(j) = found {
            lo = xs[j];
            hi = xs[j + 1];
            g_lo = gs[j];
            g_hi = gs[j + 1];
            break;
        }
        if grid >= GRID_MAX {
            return Err(Error::BracketNotFound { grid });
        }
        grid *= 2;
    }

    for it in 1.. {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let (x, gx) = if g_lo.abs() <= g_hi.abs() { (lo, g_lo) } else { (hi, g_hi) };
            return if gx.abs() <= tol {
                Ok(x)
            } else {
                Err(Error::NoConvergence { iterations: it })
            };
        }
        let g_mid = g(mid)?;
        if g_mid.abs() <= tol {
            return Ok(mid);
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    unreachable!("bisection loop only exits by returning")
}
