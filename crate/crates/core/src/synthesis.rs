//! Ergodic Markov measures with a prescribed suspension-flow entropy.
//!
//! The roof is lifted to a 0-window roof `φ_N` on the `N`-block shift, the
//! chain-split model `(B, τ)` is built at precision `η`, and the entropy
//! path on `B` is pushed down to `A_N`. Along that family
//! `F(s) = h(μ_s) / ∫ φ_N dμ_s` is continuous, small near `s = 0` and above
//! the target at `s = 1`, so an intermediate-value solve finds `s_0`.

use crate::block_recode::{build_recode, BlockRecode};
use crate::entropy_path::{solve_ivt, EntropyPath};
use crate::error::{Error, Result};
use crate::markov::{parry_from_perron, MarkovChain};
use crate::roof_flatten::{build_flatten, FlattenModel};
use crate::sft::Sft;
use crate::suspension::{abramov_entropy, required_block_len, RoofFn};

/// Lower end of the path parameter range.
pub const S_LOW: f64 = 1e-9;
pub const DEFAULT_ETA: f64 = 1e-3;
const MAX_RETRIES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub tol: f64,
    /// Precision used for the initial top-entropy bracket.
    pub eta: Option<f64>,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            tol: 1e-8,
            eta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisReport {
    pub n_used: usize,
    pub recode: BlockRecode,
    /// The roof lifted to `A_N`, constant on 0-cylinders.
    pub lifted_roof: RoofFn,
    pub model: FlattenModel,
    pub t_star: f64,
    /// The measure, as a Markov chain on `A_N`.
    pub chain: MarkovChain,
    pub achieved: f64,
    pub target: f64,
    pub tol: f64,
    pub eta_used: f64,
    pub delta_used: f64,
    /// `(F(S_LOW), F(1))`.
    pub bracket: (f64, f64),
    /// Top-entropy bracket of the flow used to admit the target.
    pub top_bounds: (f64, f64),
    pub ergodic: bool,
    pub attempts: usize,
}

pub fn synthesize(s: &Sft, roof: &RoofFn, h: f64, tol: f64) -> Result<SynthesisReport> {
    synthesize_with(s, roof, h, SynthesisOptions { tol, eta: None })
}

pub fn synthesize_with(s: &Sft, roof: &RoofFn, h: f64, opts: SynthesisOptions) -> Result<SynthesisReport> {
    let tol = opts.tol;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "tol", value: tol });
    }
    if !s.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    if roof.ambient() != s {
        return Err(Error::InvalidRoof("roof is defined over a different shift".into()));
    }

    let (left, right) = roof.window();
    let n = required_block_len(left, right);
    let recode = build_recode(s, n)?;
    let lifted = recode.lift_roof(roof)?;
    let a_n = recode.target();

    let eta0 = opts.eta.unwrap_or(DEFAULT_ETA);
    let probe = build_flatten(a_n, &lifted, eta0)?;
    let lo = probe.flow_top_entropy()?;
    let top_bounds = (lo, lo + eta0);
    if !(h > 0.0) || !(h < lo - tol) {
        return Err(Error::TargetOutOfRange {
            target: h,
            top_lo: top_bounds.0,
            top_hi: top_bounds.1,
        });
    }

    // `lo` is a certified lower bound for the top entropy, so this choice
    // keeps F(1) >= lo - η >= h + 3η.
    let mut eta = ((lo - h) / 4.0).min(h / 4.0);
    for attempt in 1..=MAX_RETRIES + 1 {
        let model = build_flatten(a_n, &lifted, eta)?;
        let parry_b = parry_from_perron(model.b(), &model.perron_b()?)?;
        let path = EntropyPath::new(model.b(), parry_b)?;
        let descend = |t: f64| -> Result<MarkovChain> { model.descend_measure(&path.measure(t)?) };
        let f = |t: f64| -> Result<f64> { abramov_entropy(&descend(t)?, &lifted) };

        let bracket = (f(S_LOW)?, f(1.0)?);
        if !(bracket.0 < h && h < bracket.1) {
            eta /= 2.0;
            continue;
        }
        let t_star = solve_ivt(f, S_LOW, 1.0, h, tol)?;
        let chain = descend(t_star)?;
        let achieved = abramov_entropy(&chain, &lifted)?;
        let ergodic = chain.is_ergodic();
        let delta_used = model.delta_used();
        return Ok(SynthesisReport {
            n_used: n,
            recode,
            lifted_roof: lifted,
            model,
            t_star,
            chain,
            achieved,
            target: h,
            tol,
            eta_used: eta,
            delta_used,
            bracket,
            top_bounds,
            ergodic,
            attempts: attempt,
        });
    }
    Err(Error::BracketFailure {
        attempts: MAX_RETRIES + 1,
        eta: eta * 2.0,
    })
}

impl SynthesisReport {
    /// Measure of the cylinder `[w]` on the original shift.
    ///
    /// Words of length at least `N` are encoded to `A_N` directly; shorter
    /// ones are summed over their admissible right extensions to length `N`.
    pub fn evaluate_cylinder_on_source(&self, w: &[usize]) -> f64 {
        evaluate_on_source(&self.recode, &self.chain, w)
    }
}

/// Source-cylinder measure of a chain on the `N`-block shift of `r`.
pub fn evaluate_on_source(r: &BlockRecode, chain: &MarkovChain, w: &[usize]) -> f64 {
    let s = r.source();
    if w.is_empty() {
        return 1.0;
    }
    if !matches!(s.is_admissible(w), Ok(true)) {
        return 0.0;
    }
    let n = r.n();
    if w.len() >= n {
        return match r.encode_word(w) {
            Ok(code) => chain.word_measure(&code),
            Err(_) => 0.0,
        };
    }
    // blocks are sorted, so the extensions of `w` form a contiguous run
    let gamma = r.gamma();
    let start = gamma.partition_point(|b| &b[..w.len()] < w);
    gamma[start..]
        .iter()
        .take_while(|b| &b[..w.len()] == w)
        .map(|b| chain.p()[r.block_index(b).expect("listed block")])
        .sum()
}
