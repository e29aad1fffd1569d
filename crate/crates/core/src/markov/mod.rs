//! Markov measures determined by a stationary pair `(p, P)`.

mod stationary;

pub use stationary::stationary_of;

use crate::error::{Error, Result};
use crate::perron::{perron_data, PerronData};
use crate::sft::{is_strongly_connected, Cylinder, Sft};

const SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
/// Probabilities below this are treated as exact zeros in entropy sums.
const LOG_FLOOR: f64 = 1e-300;

/// A shift-invariant Markov measure: a probability vector `p` and a
/// stochastic matrix `P` with `pP = p`. Rows are stored sparsely, holding
/// only the strictly positive transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    p: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl MarkovChain {
    /// Validates `(p, P)` with `P` in sparse row form.
    pub fn new(p: Vec<f64>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let k = p.len();
        if k == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if rows.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: rows.len(),
            });
        }
        if let Some(&bad) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidProbability(format!("entry {bad}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidProbability(format!("sums to {total}")));
        }

        let mut clean = Vec::with_capacity(k);
        for (i, row) in rows.into_iter().enumerate() {
            let mut row: Vec<(usize, f64)> = row;
            for &(j, x) in &row {
                if j >= k {
                    return Err(Error::SymbolOutOfRange { symbol: j, k });
                }
                if !(x >= 0.0) || !x.is_finite() {
                    return Err(Error::NotStochastic { row: i, sum: x });
                }
            }
            row.retain(|&(_, x)| x > 0.0);
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (j, x) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += x,
                    _ => merged.push((j, x)),
                }
            }
            let sum: f64 = merged.iter().map(|e| e.1).sum();
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(Error::NotStochastic { row: i, sum });
            }
            clean.push(merged);
        }

        let chain = MarkovChain { p, rows: clean };
        let residual = chain.stationarity_residual();
        if residual > STATIONARY_TOL {
            return Err(Error::NotStationary { residual });
        }
        Ok(chain)
    }

    /// Builds a chain from a dense stochastic matrix.
    pub fn from_dense(p: Vec<f64>, matrix: &[Vec<f64>]) -> Result<Self> {
        let k = p.len();
        if matrix.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: matrix.len(),
            });
        }
        let mut rows = Vec::with_capacity(k);
        for row in matrix {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            rows.push(row.iter().copied().enumerate().collect());
        }
        Self::new(p, rows)
    }

    /// Builds the chain of an irreducible stochastic matrix together with
    /// its stationary vector.
    pub fn from_transitions(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let p = stationary_of(&rows)?;
        Self::new(p, rows)
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Positive transitions out of `i`, sorted by target.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Transition probability `p_ij`.
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        match self.rows.get(i) {
            Some(row) => row
                .binary_search_by_key(&j, |e| e.0)
                .map(|idx| row[idx].1)
                .unwrap_or(0.0),
            None => 0.0,
        }
    }

    pub fn dense_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.k();
        let mut m = vec![vec![0.0; k]; k];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, x) in row {
                m[i][j] = x;
            }
        }
        m
    }

    /// Max over `j` of `|sum_i p_i p_ij - p_j|`.
    pub fn stationarity_residual(&self) -> f64 {
        let mut next = vec![0.0; self.k()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, x) in row {
                next[j] += self.p[i] * x;
            }
        }
        next.iter()
            .zip(&self.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Fails with the first positive transition not allowed by `s`.
    pub fn check_support(&self, s: &Sft) -> Result<()> {
        if s.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: s.k(),
                found: self.k(),
            });
        }
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(&(j, _)) = row.iter().find(|&&(j, _)| !s.allowed(i, j)) {
                return Err(Error::SupportViolation { from: i, to: j });
            }
        }
        Ok(())
    }

    /// `mu([w_0 .. w_{n-1}]) = p_{w_0} p_{w_0 w_1} ... p_{w_{n-2} w_{n-1}}`.
    /// The value does not depend on where the cylinder sits.
    pub fn word_measure(&self, w: &[usize]) -> f64 {
        let Some(&first) = w.first() else {
            return 1.0;
        };
        if first >= self.k() {
            return 0.0;
        }
        let mut m = self.p[first];
        for pair in w.windows(2) {
            if m == 0.0 {
                break;
            }
            m *= self.prob(pair[0], pair[1]);
        }
        m
    }

    pub fn cylinder_measure(&self, c: &Cylinder) -> f64 {
        self.word_measure(c.word())
    }

    /// `-sum_ij p_i p_ij log p_ij`, natural logarithm.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            if self.p[i] < LOG_FLOOR {
                continue;
            }
            let row_h: f64 = row
                .iter()
                .filter(|e| e.1 >= LOG_FLOOR)
                .map(|&(_, x)| -x * x.ln())
                .sum();
            h += self.p[i] * row_h;
        }
        h.max(0.0)
    }

    /// A Markov measure is ergodic iff `P` restricted to `{i : p_i > 0}` is
    /// irreducible.
    pub fn is_ergodic(&self) -> bool {
        let support: Vec<usize> = (0..self.k()).filter(|&i| self.p[i] > 0.0).collect();
        let mut local = vec![usize::MAX; self.k()];
        for (idx, &i) in support.iter().enumerate() {
            local[i] = idx;
        }
        let adj: Vec<Vec<usize>> = support
            .iter()
            .map(|&i| {
                self.rows[i]
                    .iter()
                    .filter(|&&(j, _)| local[j] != usize::MAX)
                    .map(|&(j, _)| local[j])
                    .collect()
            })
            .collect();
        is_strongly_connected(&adj)
    }
}

/// Checks a dense `(p, P)` pair against the ambient shift.
pub fn validate_chain(p: Vec<f64>, matrix: &[Vec<f64>], s: &Sft) -> Result<MarkovChain> {
    if p.len() != s.k() {
        return Err(Error::DimensionMismatch {
            expected: s.k(),
            found: p.len(),
        });
    }
    let chain = MarkovChain::from_dense(p, matrix)?;
    chain.check_support(s)?;
    Ok(chain)
}

/// The Parry measure `p_i = u_i v_i`, `p_ij = a_ij v_j / (lambda v_i)`.
pub fn parry_measure(s: &Sft) -> Result<MarkovChain> {
    let pd = perron_data(s)?;
    parry_from_perron(s, &pd)
}

/// Parry measure from precomputed Perron data of `s`.
pub fn parry_from_perron(s: &Sft, pd: &PerronData) -> Result<MarkovChain> {
    if pd.k() != s.k() {
        return Err(Error::DimensionMismatch {
            expected: s.k(),
            found: pd.k(),
        });
    }
    let mut p: Vec<f64> = pd.left.iter().zip(&pd.right).map(|(u, v)| u * v).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);

    let rows = (0..s.k())
        .map(|i| {
            let mut row: Vec<(usize, f64)> = s
                .successors(i)
                .iter()
                .map(|&j| (j, pd.right[j] / (pd.lambda * pd.right[i])))
                .collect();
            let sum: f64 = row.iter().map(|e| e.1).sum();
            row.iter_mut().for_each(|e| e.1 /= sum);
            row
        })
        .collect();
    MarkovChain::new(p, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Sft {
        Sft::new(2, &[vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn bernoulli_half() -> MarkovChain {
        MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn validation() {
        let full = Sft::full(2).unwrap();
        assert!(validate_chain(vec![0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]], &full).is_ok());
        let id = validate_chain(vec![0.5, 0.5], &[vec![1.0, 0.0], vec![0.0, 1.0]], &full).unwrap();
        assert!(!id.is_ergodic());
        assert!(matches!(
            validate_chain(vec![1.0, 0.0], &[vec![0.5, 0.5], vec![1.0, 0.0]], &full),
            Err(Error::NotStationary { .. })
        ));
        assert!(matches!(
            validate_chain(vec![0.5, 0.5], &[vec![0.5, 0.6], vec![0.5, 0.5]], &full),
            Err(Error::NotStochastic { row: 0, .. })
        ));
        assert_eq!(
            validate_chain(vec![0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]], &golden()),
            Err(Error::SupportViolation { from: 1, to: 1 })
        );
    }

    #[test]
    fn cylinder_values() {
        let b = bernoulli_half();
        assert_eq!(b.word_measure(&[0, 1, 1]), 0.125);
        let g = golden();
        let parry = parry_measure(&g).unwrap();
        assert_eq!(parry.word_measure(&[1, 1]), 0.0);
        let pd = perron_data(&g).unwrap();
        assert!((parry.word_measure(&[0]) - pd.left[0] * pd.right[0]).abs() < 1e-15);
        let c = Cylinder::new(&g, vec![0, 1], -7).unwrap();
        assert_eq!(parry.cylinder_measure(&c), parry.word_measure(&[0, 1]));
    }

    #[test]
    fn entropy_values() {
        assert!((bernoulli_half().entropy() - 2f64.ln()).abs() < 1e-15);
        let swap = MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(swap.entropy(), 0.0);
        let g = golden();
        let h = parry_measure(&g).unwrap().entropy();
        assert!((h - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn parry_examples() {
        let full = parry_measure(&Sft::full(2).unwrap()).unwrap();
        for i in 0..2 {
            assert!((full.p()[i] - 0.5).abs() < 1e-15);
            for j in 0..2 {
                assert!((full.prob(i, j) - 0.5).abs() < 1e-15);
            }
        }
        let g = parry_measure(&golden()).unwrap();
        assert!((g.prob(1, 0) - 1.0).abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g.prob(0, 0) - 1.0 / phi).abs() < 1e-14);
        assert!(g.is_ergodic());

        let swap = Sft::new(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        let m = parry_measure(&swap).unwrap();
        assert!((m.p()[0] - 0.5).abs() < 1e-15);
        assert_eq!(m.prob(0, 1), 1.0);
        assert_eq!(m.entropy(), 0.0);
    }

    #[test]
    fn ergodicity_on_support() {
        assert!(bernoulli_half().is_ergodic());
        // mass only on the loop at 0; state 1 is transient and unweighted
        let c = MarkovChain::from_dense(vec![1.0, 0.0], &[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(c.is_ergodic());
    }

    #[test]
    fn stationary_from_transitions() {
        let c = MarkovChain::from_transitions(vec![vec![(0, 0.9), (1, 0.1)], vec![(0, 0.5), (1, 0.5)]])
            .unwrap();
        assert!((c.p()[0] - 5.0 / 6.0).abs() < 1e-15);
    }
}
