//! Stationary vectors of irreducible stochastic matrices.
//!
//! Both solvers use Grassmann–Taksar–Heyman state reduction, which is
//! subtraction-free and therefore accurate even when transition
//! probabilities span many orders of magnitude. Small chains are reduced
//! densely in natural order; larger ones sparsely, eliminating states in
//! minimum-fill order so that chain-like graphs reduce with no fill-in.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::sft::is_strongly_connected;

const DENSE_LIMIT: usize = 64;
const ROW_TOL: f64 = 1e-12;

/// The unique probability vector `p` with `pP = p` for an irreducible
/// stochastic matrix given in sparse form.
pub fn stationary_of(rows: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut adj = vec![Vec::new(); k];
    for (i, row) in rows.iter().enumerate() {
        let mut sum = 0.0;
        for &(j, p) in row {
            if j >= k {
                return Err(Error::SymbolOutOfRange { symbol: j, k });
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::NotStochastic { row: i, sum: p });
            }
            sum += p;
            if p > 0.0 {
                adj[i].push(j);
            }
        }
        if (sum - 1.0).abs() > ROW_TOL {
            return Err(Error::NotStochastic { row: i, sum });
        }
    }
    if !is_strongly_connected(&adj) {
        return Err(Error::NotIrreducible);
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    if k <= DENSE_LIMIT {
        dense_gth(rows)
    } else {
        sparse_gth(rows)
    }
}

pub(crate) fn dense_gth(rows: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let k = rows.len();
    let mut a = vec![vec![0.0; k]; k];
    for (i, row) in rows.iter().enumerate() {
        for &(j, p) in row {
            a[i][j] += p;
        }
    }
    for n in (1..k).rev() {
        let s: f64 = a[n][..n].iter().sum();
        if s <= 0.0 {
            return Err(Error::NotIrreducible);
        }
        for i in 0..n {
            a[i][n] /= s;
        }
        for i in 0..n {
            let ain = a[i][n];
            if ain == 0.0 {
                continue;
            }
            for j in 0..n {
                a[i][j] += ain * a[n][j];
            }
        }
    }
    let mut pi = vec![0.0; k];
    pi[0] = 1.0;
    for j in 1..k {
        pi[j] = (0..j).map(|i| pi[i] * a[i][j]).sum();
    }
    normalize(&mut pi);
    Ok(pi)
}

pub(crate) fn sparse_gth(rows: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let k = rows.len();
    let mut out: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
    let mut inn: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for (i, row) in rows.iter().enumerate() {
        for &(j, p) in row {
            if p > 0.0 {
                *out[i].entry(j).or_insert(0.0) += p;
                if i != j {
                    inn[j].insert(i);
                }
            }
        }
    }

    let cost_of = |out: &[BTreeMap<usize, f64>], inn: &[BTreeSet<usize>], x: usize| {
        let outdeg = out[x].keys().filter(|&&j| j != x).count();
        inn[x].len() * outdeg
    };
    let mut cost: Vec<usize> = (0..k).map(|x| cost_of(&out, &inn, x)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..k).map(|x| (cost[x], x)).collect();
    let mut alive = vec![true; k];
    let mut order = Vec::with_capacity(k - 1);
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];

    while order.len() + 1 < k {
        let (_, x) = queue.pop_first().expect("queue holds every live state");
        let succs: Vec<(usize, f64)> = out[x]
            .iter()
            .filter(|(&j, _)| j != x)
            .map(|(&j, &p)| (j, p))
            .collect();
        let s: f64 = succs.iter().map(|&(_, p)| p).sum();
        if s <= 0.0 {
            return Err(Error::NotIrreducible);
        }
        let preds: Vec<usize> = inn[x].iter().copied().collect();
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for &i in &preds {
            let p_ix = out[i].remove(&x).unwrap_or(0.0);
            let c = p_ix / s;
            incoming[x].push((i, c));
            for &(j, p_xj) in &succs {
                *out[i].entry(j).or_insert(0.0) += c * p_xj;
                if j != i {
                    inn[j].insert(i);
                }
            }
            touched.insert(i);
        }
        for &(j, _) in &succs {
            inn[j].remove(&x);
            touched.insert(j);
        }
        alive[x] = false;
        order.push(x);
        for y in touched {
            if !alive[y] {
                continue;
            }
            queue.remove(&(cost[y], y));
            cost[y] = cost_of(&out, &inn, y);
            queue.insert((cost[y], y));
        }
    }

    let root = (0..k).find(|&x| alive[x]).expect("one state survives");
    let mut pi = vec![0.0; k];
    pi[root] = 1.0;
    for &x in order.iter().rev() {
        pi[x] = incoming[x].iter().map(|&(i, c)| pi[i] * c).sum();
    }
    normalize(&mut pi);
    Ok(pi)
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}
