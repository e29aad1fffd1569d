//! Constant-roof models. A 0-window roof is rounded up to multiples
//! `l_i τ` of a common step, and each symbol `i` is split into a chain of
//! `l_i` states; the suspension with roof `l_i τ` is then the suspension of
//! the chain-split shift `B` under the constant roof `τ`.

use crate::error::{Error, Result};
use crate::markov::MarkovChain;
use crate::perron::{perron_data, perron_weighted, PerronData, SparseRows};
use crate::sft::{Sft, Word};
use crate::suspension::RoofFn;

const MAX_DENOMINATOR: usize = 64;
const RATIO_TOL: f64 = 1e-12;
/// Upper bound on the number of chain-split states.
pub const MAX_STATES: usize = 10_000_000;
const NEWTON_MAX: usize = 200;

fn check_inputs(values: &[f64], delta: f64) -> Result<()> {
    if !(delta > 0.0) || delta.is_nan() {
        return Err(Error::ParameterOutOfRange { name: "delta", value: delta });
    }
    if let Some(&v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidRoof(format!("value {v} is not a positive number")));
    }
    if values.is_empty() {
        return Err(Error::InvalidRoof("no roof values".into()));
    }
    Ok(())
}

/// Steps `τ = δ/8` and `l_i = ⌈v_i/τ⌉`, so `v_i <= l_i τ < v_i + δ/8`.
/// An infinite `δ` is first reduced to `8 max v`, where every `l_i` is 1.
pub fn rationalize_roof(values: &[f64], delta: f64) -> Result<(f64, Vec<usize>)> {
    check_inputs(values, delta)?;
    let vmax = values.iter().copied().fold(0.0, f64::max);
    let tau = delta.min(8.0 * vmax) / 8.0;
    let mut l = Vec::with_capacity(values.len());
    let mut total = 0usize;
    for &v in values {
        let steps = (v / tau).ceil();
        if steps > MAX_STATES as f64 {
            return Err(Error::ParameterOutOfRange { name: "delta", value: delta });
        }
        let mut li = (steps as usize).max(1);
        while (li as f64) * tau < v {
            li += 1;
        }
        while li > 1 && ((li - 1) as f64) * tau >= v {
            li -= 1;
        }
        total += li;
        if total > MAX_STATES {
            return Err(Error::ParameterOutOfRange { name: "delta", value: delta });
        }
        l.push(li);
    }
    Ok((tau, l))
}

/// Like [`rationalize_roof`], but first looks for a step `τ₀ = min v / q`
/// with `q <= 64` and `τ₀ >= δ/8` of which every value is an integer
/// multiple. Roofs that are already rationally related keep `φ' = φ` and a
/// small state count.
pub fn rationalize_roof_compact(values: &[f64], delta: f64) -> Result<(f64, Vec<usize>)> {
    check_inputs(values, delta)?;
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    for q in 1..=MAX_DENOMINATOR {
        let tau = vmin / q as f64;
        if tau < delta / 8.0 {
            break;
        }
        let l: Option<Vec<usize>> = values
            .iter()
            .map(|&v| {
                let r = v / tau;
                let li = r.round();
                ((r - li).abs() <= RATIO_TOL * r && li >= 1.0).then_some(li as usize)
            })
            .collect();
        if let Some(l) = l {
            if l.iter().sum::<usize>() <= MAX_STATES {
                return Ok((tau, l));
            }
        }
    }
    rationalize_roof(values, delta)
}

/// The chain-split model of a 0-window roof on `source`. State `(i, α)` of
/// `B` has index `offsets[i] + α`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenModel {
    source: Sft,
    values: Vec<f64>,
    tau: f64,
    l: Vec<usize>,
    offsets: Vec<usize>,
    b: Sft,
    delta: f64,
    eta: f64,
}

/// Builds the model at precision `eta`, with `δ = η a² / h_top(source)`.
pub fn build_flatten(s: &Sft, roof0: &RoofFn, eta: f64) -> Result<FlattenModel> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "eta", value: eta });
    }
    if roof0.ambient() != s {
        return Err(Error::InvalidRoof("roof is defined over a different shift".into()));
    }
    let values = roof0
        .symbol_values()
        .ok_or_else(|| Error::InvalidRoof("flattening needs a roof depending on x_0 only".into()))?;
    let h_top = perron_data(s)?.lambda.ln();
    let a = roof0.min_value();
    let delta = if h_top > 0.0 {
        (eta * a * a / h_top).min(8.0 * roof0.max_value())
    } else {
        8.0 * roof0.max_value()
    };
    let (tau, l) = rationalize_roof_compact(&values, delta)?;

    let mut offsets = Vec::with_capacity(l.len() + 1);
    let mut acc = 0;
    for &li in &l {
        offsets.push(acc);
        acc += li;
    }
    offsets.push(acc);

    let mut edges = Vec::with_capacity(acc + s.edge_count());
    for i in 0..s.k() {
        let base = offsets[i];
        for alpha in 0..l[i] - 1 {
            edges.push((base + alpha, base + alpha + 1));
        }
        for &j in s.successors(i) {
            edges.push((base + l[i] - 1, offsets[j]));
        }
    }
    let b = Sft::from_edges(acc, edges)?;
    Ok(FlattenModel {
        source: s.clone(),
        values,
        tau,
        l,
        offsets,
        b,
        delta,
        eta,
    })
}

/// A word of the chain-split shift read as a base word: the first symbol's
/// chain starts at `start_phase`, the last symbol's ends at `end_phase`, and
/// every chain in between is complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatWord {
    pub base: Word,
    pub start_phase: usize,
    pub end_phase: usize,
}

impl FlattenModel {
    pub fn source(&self) -> &Sft {
        &self.source
    }

    pub fn b(&self) -> &Sft {
        &self.b
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn l(&self) -> &[usize] {
        &self.l
    }

    /// Number of states `L` of `B`.
    pub fn num_states(&self) -> usize {
        self.offsets[self.l.len()]
    }

    pub fn delta_used(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The original roof values `φ(i)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `φ'(i) = l_i τ`.
    pub fn flat_values(&self) -> Vec<f64> {
        self.l.iter().map(|&li| li as f64 * self.tau).collect()
    }

    pub fn flat_roof(&self) -> Result<RoofFn> {
        RoofFn::from_symbol_values(&self.source, &self.flat_values())
    }

    /// Whether `l_i τ` reproduces every roof value to rounding.
    pub fn is_exact(&self) -> bool {
        self.values
            .iter()
            .zip(self.flat_values())
            .all(|(&v, f)| (f - v).abs() <= RATIO_TOL * v)
    }

    /// Index of state `(i, α)`.
    pub fn state(&self, i: usize, alpha: usize) -> Result<usize> {
        let k = self.l.len();
        if i >= k {
            return Err(Error::SymbolOutOfRange { symbol: i, k });
        }
        if alpha >= self.l[i] {
            return Err(Error::PhaseOutOfRange {
                symbol: i,
                phase: alpha,
                len: self.l[i],
            });
        }
        Ok(self.offsets[i] + alpha)
    }

    /// `(i, α)` of a state of `B`.
    pub fn label(&self, m: usize) -> (usize, usize) {
        let i = self.offsets.partition_point(|&o| o <= m) - 1;
        (i, m - self.offsets[i])
    }

    fn time_changed(&self, x: f64) -> SparseRows {
        (0..self.source.k())
            .map(|m| {
                let w = (-x * self.l[m] as f64).exp();
                self.source.successors(m).iter().map(|&n| (n, w)).collect()
            })
            .collect()
    }

    /// `log λ_B`: the root `x` of `ρ([a_mn e^{-x l_m}]) = 1`, found by Newton's
    /// method on the convex decreasing function `log ρ`.
    fn log_lambda_b(&self) -> Result<(f64, PerronData)> {
        let mut x = 0.0;
        let mut pd = perron_weighted(&self.time_changed(x))?;
        if pd.lambda <= 1.0 {
            return Ok((0.0, pd));
        }
        for it in 0..NEWTON_MAX {
            let g = pd.lambda.ln();
            let slope: f64 = -(0..self.l.len())
                .map(|m| pd.left[m] * self.l[m] as f64 * pd.right[m])
                .sum::<f64>();
            let step = -g / slope;
            let next = x + step;
            let next_pd = perron_weighted(&self.time_changed(next))?;
            if step.abs() <= 4.0 * f64::EPSILON * next.abs() || next_pd.lambda.ln().abs() >= g.abs() {
                // no further progress is possible in floating point
                return Ok(if next_pd.lambda.ln().abs() < g.abs() { (next, next_pd) } else { (x, pd) });
            }
            x = next;
            pd = next_pd;
            if it + 1 == NEWTON_MAX {
                return Err(Error::NoConvergence { iterations: NEWTON_MAX });
            }
        }
        unreachable!("Newton loop returns or errors")
    }

    /// Spectral radius of `B`.
    pub fn lambda_b(&self) -> Result<f64> {
        Ok(self.log_lambda_b()?.0.exp())
    }

    /// `log λ_B / τ`, the top entropy of the flow under the rounded roof.
    pub fn flow_top_entropy(&self) -> Result<f64> {
        Ok(self.log_lambda_b()?.0 / self.tau)
    }

    /// Perron data of `B` assembled from the time-changed matrix on the
    /// source: `v(m_α) = λ^α w_m` and `u(m_α) = λ^{-α} z_m`.
    pub fn perron_b(&self) -> Result<PerronData> {
        let (x, pd) = self.log_lambda_b()?;
        let lambda = x.exp();
        let total = self.num_states();
        let mut right = vec![0.0; total];
        let mut left = vec![0.0; total];
        for m in 0..self.l.len() {
            for alpha in 0..self.l[m] {
                let a = alpha as f64 * x;
                right[self.offsets[m] + alpha] = pd.right[m] * a.exp();
                left[self.offsets[m] + alpha] = pd.left[m] * (-a).exp();
            }
        }
        let s: f64 = right.iter().sum();
        right.iter_mut().for_each(|v| *v /= s);
        let dot: f64 = left.iter().zip(&right).map(|(u, v)| u * v).sum();
        left.iter_mut().for_each(|u| *u /= dot);
        Ok(PerronData { lambda, left, right })
    }

    pub fn flatten_encode(&self, w: &FlatWord) -> Result<Word> {
        let Some((&first, rest)) = w.base.split_first() else {
            return Err(Error::NotAdmissible("empty base word".into()));
        };
        if !self.source.is_admissible(&w.base)? {
            return Err(Error::NotAdmissible(format!("{} in the source shift", w.base)));
        }
        let last = *w.base.last().expect("non-empty");
        self.state(first, w.start_phase)?;
        self.state(last, w.end_phase)?;
        if rest.is_empty() && w.start_phase > w.end_phase {
            return Err(Error::NotAdmissible(format!(
                "phase {} precedes phase {} within one chain",
                w.end_phase, w.start_phase
            )));
        }
        let n = w.base.len();
        let mut out = Vec::new();
        for (pos, &i) in w.base.iter().enumerate() {
            let from = if pos == 0 { w.start_phase } else { 0 };
            let to = if pos + 1 == n { w.end_phase } else { self.l[i] - 1 };
            out.extend((from..=to).map(|a| self.offsets[i] + a));
        }
        Ok(out.into())
    }

    pub fn flatten_decode(&self, w: &[usize]) -> Result<FlatWord> {
        let Some(&first) = w.first() else {
            return Err(Error::NotAdmissible("empty word".into()));
        };
        if !self.b.is_admissible(w)? {
            return Err(Error::NotAdmissible(format!("{} in the chain-split shift", Word::from(w))));
        }
        let (i0, start_phase) = self.label(first);
        let mut base = vec![i0];
        for &m in &w[1..] {
            let (i, alpha) = self.label(m);
            if alpha == 0 {
                base.push(i);
            }
        }
        let end_phase = self.label(*w.last().expect("non-empty")).1;
        Ok(FlatWord {
            base: base.into(),
            start_phase,
            end_phase,
        })
    }

    /// The base chain seen by `ν` on the section `{m_0}`:
    /// `p_m = ν(m_0) / Z` and `P_mn = ν(m_{l_m - 1} -> n_0)`.
    pub fn descend_measure(&self, nu: &MarkovChain) -> Result<MarkovChain> {
        nu.check_support(&self.b)?;
        if !nu.is_ergodic() {
            return Err(Error::NotErgodic);
        }
        let k = self.source.k();
        let mut p: Vec<f64> = (0..k).map(|m| nu.p()[self.offsets[m]]).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= z);
        let rows = (0..k)
            .map(|m| {
                let tail = self.offsets[m] + self.l[m] - 1;
                self.source
                    .successors(m)
                    .iter()
                    .map(|&n| (n, nu.prob(tail, self.offsets[n])))
                    .collect()
            })
            .collect();
        MarkovChain::new(p, rows)
    }
}
