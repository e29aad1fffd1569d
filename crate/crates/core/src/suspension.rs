//! Suspension flows under finite-window roof functions.

use std::collections::BTreeMap;

use crate::block_recode::build_recode;
use crate::error::{Error, Result};
use crate::markov::MarkovChain;
use crate::roof_flatten::build_flatten;
use crate::sft::Sft;

/// A strictly positive roof whose value at `x` depends only on
/// `x_{-left} .. x_{right}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofFn {
    ambient: Sft,
    left: usize,
    right: usize,
    table: BTreeMap<Vec<usize>, f64>,
    min: f64,
    max: f64,
}

impl RoofFn {
    /// `table` must list every admissible word of length `left + right + 1`
    /// and nothing else.
    pub fn new(
        ambient: &Sft,
        left: usize,
        right: usize,
        table: BTreeMap<Vec<usize>, f64>,
    ) -> Result<Self> {
        let width = left + right + 1;
        let words = ambient.admissible_words(width);
        if words.len() != table.len() {
            return Err(Error::InvalidRoof(format!(
                "table has {} entries but there are {} admissible words of length {width}",
                table.len(),
                words.len()
            )));
        }
        for w in &words {
            if !table.contains_key(&w[..]) {
                return Err(Error::InvalidRoof(format!("missing value for word {w}")));
            }
        }
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for (w, &v) in &table {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidRoof(format!(
                    "value {v} for word {w:?} is not a positive number"
                )));
            }
            min = min.min(v);
            max = max.max(v);
        }
        Ok(RoofFn {
            ambient: ambient.clone(),
            left,
            right,
            table,
            min,
            max,
        })
    }

    /// Roof depending on `x_0` only.
    pub fn from_symbol_values(ambient: &Sft, values: &[f64]) -> Result<Self> {
        if values.len() != ambient.k() {
            return Err(Error::DimensionMismatch {
                expected: ambient.k(),
                found: values.len(),
            });
        }
        let table = values.iter().enumerate().map(|(i, &v)| (vec![i], v)).collect();
        Self::new(ambient, 0, 0, table)
    }

    pub fn constant(ambient: &Sft, c: f64) -> Result<Self> {
        Self::from_symbol_values(ambient, &vec![c; ambient.k()])
    }

    pub fn ambient(&self) -> &Sft {
        &self.ambient
    }

    /// `(left, right)` offsets of the window.
    pub fn window(&self) -> (usize, usize) {
        (self.left, self.right)
    }

    pub fn width(&self) -> usize {
        self.left + self.right + 1
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.table
    }

    /// Value on the window word `w`, or `None` if `w` is not in the table.
    pub fn value(&self, w: &[usize]) -> Option<f64> {
        self.table.get(w).copied()
    }

    /// The minimum `a` of the roof.
    pub fn min_value(&self) -> f64 {
        self.min
    }

    pub fn max_value(&self) -> f64 {
        self.max
    }

    pub fn constant_value(&self) -> Option<f64> {
        (self.min == self.max).then_some(self.min)
    }

    /// Per-symbol values of a 0-window roof.
    pub fn symbol_values(&self) -> Option<Vec<f64>> {
        if self.left != 0 || self.right != 0 {
            return None;
        }
        Some(self.table.values().copied().collect())
    }

    /// The same function seen through a wider window.
    pub fn padded(&self, left: usize, right: usize) -> Result<RoofFn> {
        if left < self.left || right < self.right {
            return Err(Error::InvalidRoof(format!(
                "cannot shrink window ({}, {}) to ({left}, {right})",
                self.left, self.right
            )));
        }
        let cut = left - self.left;
        let table = self
            .ambient
            .admissible_words(left + right + 1)
            .into_iter()
            .map(|w| {
                let v = self.table[&w[cut..cut + self.width()]];
                (w.into_inner(), v)
            })
            .collect();
        RoofFn::new(&self.ambient, left, right, table)
    }
}

/// A base shift together with its roof.
#[derive(Debug, Clone, PartialEq)]
pub struct Suspension {
    base: Sft,
    roof: RoofFn,
}

impl Suspension {
    pub fn new(base: Sft, roof: RoofFn) -> Result<Self> {
        if roof.ambient() != &base {
            return Err(Error::InvalidRoof("roof is defined over a different shift".into()));
        }
        Ok(Suspension { base, roof })
    }

    pub fn base(&self) -> &Sft {
        &self.base
    }

    pub fn roof(&self) -> &RoofFn {
        &self.roof
    }

    /// Top entropy bracket of the flow; see [`flow_top_entropy_bounds`].
    pub fn top_entropy_bounds(&self, eta: f64) -> Result<FlowEntropyBounds> {
        flow_top_entropy_bounds(&self.base, &self.roof, eta)
    }
}

/// `∫ φ dμ` as a sum over window cylinders.
pub fn roof_integral(roof: &RoofFn, mc: &MarkovChain) -> Result<f64> {
    if mc.k() != roof.ambient.k() {
        return Err(Error::DimensionMismatch {
            expected: roof.ambient.k(),
            found: mc.k(),
        });
    }
    if let Some(c) = roof.constant_value() {
        return Ok(c);
    }
    Ok(roof
        .table
        .iter()
        .map(|(w, &v)| mc.word_measure(w) * v)
        .sum())
}

/// Flow entropy of the lifted measure, `h_μ / ∫ φ dμ`.
pub fn abramov_entropy(mc: &MarkovChain, roof: &RoofFn) -> Result<f64> {
    Ok(mc.entropy() / roof_integral(roof, mc)?)
}

/// Certified bracket for the top entropy of a suspension flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEntropyBounds {
    pub lo: f64,
    pub hi: f64,
    /// The rationalized roof equals the true one, so `lo` is the top entropy.
    pub exact: bool,
    pub block_len: usize,
    pub tau: f64,
    pub lambda_b: f64,
}

/// Smallest `n >= 2` whose blocks contain the window `(left, right)` around
/// the anchor `⌊(n-1)/2⌋`.
pub fn required_block_len(left: usize, right: usize) -> usize {
    (2..)
        .find(|&n| (n - 1) / 2 >= left && n / 2 >= right)
        .expect("some block length fits")
}

/// `[log λ_B / τ, log λ_B / τ + eta]`, where `(B, τ)` is the constant-roof
/// model of the roof at precision `eta`. The true top entropy lies inside.
pub fn flow_top_entropy_bounds(s: &Sft, roof: &RoofFn, eta: f64) -> Result<FlowEntropyBounds> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "eta", value: eta });
    }
    if !s.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    if roof.ambient() != s {
        return Err(Error::InvalidRoof("roof is defined over a different shift".into()));
    }
    let (left, right) = roof.window();
    let (block_len, model) = if left == 0 && right == 0 {
        (1, build_flatten(s, roof, eta)?)
    } else {
        let n = required_block_len(left, right);
        let recode = build_recode(s, n)?;
        let lifted = recode.lift_roof(roof)?;
        (n, build_flatten(recode.target(), &lifted, eta)?)
    };
    let lambda_b = model.lambda_b()?;
    let lo = lambda_b.ln() / model.tau();
    Ok(FlowEntropyBounds {
        lo,
        hi: lo + eta,
        exact: model.is_exact(),
        block_len,
        tau: model.tau(),
        lambda_b,
    })
}
