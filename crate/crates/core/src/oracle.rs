//! Independent checks: seeded sampling of Markov chains, plug-in entropy
//! and Birkhoff-average estimates with bootstrap errors, and exhaustive
//! cylinder comparisons.
//!
//! Randomness comes from ChaCha20 (`rand_chacha` 0.9). A seed selects the
//! key; independent streams of one seed are selected with `set_stream`, so
//! trajectories are bit-reproducible on every platform.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::markov::MarkovChain;
use crate::sft::Sft;
use crate::suspension::RoofFn;

/// Stream used for trajectories.
pub const STREAM_PATH: u64 = 0;
/// Stream used for bootstrap resampling.
pub const STREAM_BOOTSTRAP: u64 = 1;
pub const BOOTSTRAP_CHUNKS: usize = 50;
pub const BOOTSTRAP_REPLICATES: usize = 200;

/// A generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    pub seed: u64,
    pub trajectory: Vec<usize>,
    pub k: usize,
}

impl SampleRun {
    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.is_empty()
    }
}

/// Point estimate with a bootstrap standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Whether `x` lies within `sigmas` standard errors. A zero error is
    /// widened to rounding scale.
    pub fn agrees_with(&self, x: f64, sigmas: f64) -> bool {
        let band = (sigmas * self.stderr).max(1e-12 * x.abs().max(1.0));
        (self.value - x).abs() <= band
    }
}

/// A trajectory of `length` symbols: `x_0 ~ p`, then rows of `P`.
pub fn sample_path(mc: &MarkovChain, seed: u64, length: usize) -> Result<SampleRun> {
    if !mc.is_ergodic() {
        return Err(Error::NotErgodic);
    }
    let mut rng = stream_rng(seed, STREAM_PATH);
    let initial = WeightedIndex::new(mc.p()).map_err(|e| Error::InvalidProbability(e.to_string()))?;
    let rows: Vec<Option<WeightedIndex<f64>>> = mc
        .rows()
        .iter()
        .map(|r| WeightedIndex::new(r.iter().map(|e| e.1)).ok())
        .collect();
    let mut trajectory = Vec::with_capacity(length);
    if length > 0 {
        let mut x = initial.sample(&mut rng);
        trajectory.push(x);
        for _ in 1..length {
            let row = rows[x].as_ref().expect("states with mass have transitions");
            x = mc.row(x)[row.sample(&mut rng)].0;
            trajectory.push(x);
        }
    }
    Ok(SampleRun {
        seed,
        trajectory,
        k: mc.k(),
    })
}

type Counts = HashMap<Vec<usize>, usize>;

fn block_counts(xs: &[usize], b: usize) -> Counts {
    let mut c = Counts::new();
    if b == 0 {
        return c;
    }
    for w in xs.windows(b) {
        *c.entry(w.to_vec()).or_insert(0) += 1;
    }
    c
}

fn merge(into: &mut Counts, from: &Counts) {
    for (w, &n) in from {
        *into.entry(w.clone()).or_insert(0) += n;
    }
}

/// Miller–Madow corrected plug-in block entropy.
fn block_entropy(c: &Counts) -> f64 {
    let total: usize = c.values().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let plug: f64 = c
        .values()
        .map(|&m| {
            let q = m as f64 / n;
            -q * q.ln()
        })
        .sum();
    plug + (c.len() as f64 - 1.0) / (2.0 * n)
}

/// Counts of `b`-blocks and of their `(b-1)`-prefixes over the same
/// positions, so that the difference is an exact conditional entropy.
fn paired_counts(xs: &[usize], b: usize) -> (Counts, Counts) {
    let hi = block_counts(xs, b);
    let mut lo = Counts::new();
    if b > 1 {
        for (w, &n) in &hi {
            *lo.entry(w[..b - 1].to_vec()).or_insert(0) += n;
        }
    }
    (hi, lo)
}

fn conditional_entropy(hi: &Counts, lo: &Counts) -> f64 {
    let h = block_entropy(hi) - if lo.is_empty() { 0.0 } else { block_entropy(lo) };
    h.max(0.0)
}

fn chunks(len: usize) -> Vec<(usize, usize)> {
    let size = len / BOOTSTRAP_CHUNKS;
    (0..BOOTSTRAP_CHUNKS)
        .map(|c| {
            let end = if c + 1 == BOOTSTRAP_CHUNKS { len } else { (c + 1) * size };
            (c * size, end)
        })
        .collect()
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// `H_b - H_{b-1}` from block frequencies, with a segment-bootstrap error
/// (50 contiguous chunks resampled 200 times).
pub fn empirical_entropy(run: &SampleRun, b: usize) -> Result<Estimate> {
    if b == 0 {
        return Err(Error::ParameterOutOfRange { name: "block length", value: 0.0 });
    }
    let needed = 100usize.saturating_mul(run.k.saturating_pow(b as u32));
    if run.len() < needed {
        return Err(Error::InsufficientData { needed, got: run.len() });
    }
    let xs = &run.trajectory;
    let (hi, lo) = paired_counts(xs, b);
    let value = conditional_entropy(&hi, &lo);

    let parts: Vec<(Counts, Counts)> = chunks(xs.len())
        .into_iter()
        .map(|(s, e)| paired_counts(&xs[s..e], b))
        .collect();
    let mut rng = stream_rng(run.seed, STREAM_BOOTSTRAP);
    let reps: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
        .map(|_| {
            let mut hi = Counts::new();
            let mut lo = Counts::new();
            for _ in 0..parts.len() {
                let (h, l) = &parts[rng.random_range(0..parts.len())];
                merge(&mut hi, h);
                merge(&mut lo, l);
            }
            conditional_entropy(&hi, &lo)
        })
        .collect();
    Ok(Estimate {
        value,
        stderr: std_dev(&reps),
    })
}

/// Birkhoff average of the roof along the run, with a segment-bootstrap
/// error.
pub fn empirical_roof_integral(run: &SampleRun, roof: &RoofFn) -> Result<Estimate> {
    let width = roof.width();
    if run.len() < width.max(BOOTSTRAP_CHUNKS) {
        return Err(Error::InsufficientData {
            needed: width.max(BOOTSTRAP_CHUNKS),
            got: run.len(),
        });
    }
    if let Some(c) = roof.constant_value() {
        return Ok(Estimate { value: c, stderr: 0.0 });
    }
    let values: Vec<f64> = run
        .trajectory
        .windows(width)
        .map(|w| {
            roof.value(w)
                .ok_or_else(|| Error::NotAdmissible(format!("window {w:?} has no roof value")))
        })
        .collect::<Result<_>>()?;
    let value = values.iter().sum::<f64>() / values.len() as f64;

    let parts: Vec<(f64, usize)> = chunks(values.len())
        .into_iter()
        .map(|(s, e)| (values[s..e].iter().sum(), e - s))
        .collect();
    let mut rng = stream_rng(run.seed, STREAM_BOOTSTRAP);
    let reps: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
        .map(|_| {
            let (mut sum, mut n) = (0.0, 0usize);
            for _ in 0..parts.len() {
                let (s, m) = parts[rng.random_range(0..parts.len())];
                sum += s;
                n += m;
            }
            sum / n as f64
        })
        .collect();
    Ok(Estimate {
        value,
        stderr: std_dev(&reps),
    })
}

/// Max of `|a(w) - b(w)|` over all admissible words of length `1..=depth`.
pub fn brute_force_cylinder_diff<A, B>(s: &Sft, a: A, b: B, depth: usize) -> f64
where
    A: Fn(&[usize]) -> f64,
    B: Fn(&[usize]) -> f64,
{
    (1..=depth)
        .flat_map(|n| s.admissible_words(n))
        .map(|w| (a(&w) - b(&w)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::parry_measure;

    fn bernoulli_half() -> MarkovChain {
        MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn sampling_is_reproducible() {
        let b = bernoulli_half();
        let r1 = sample_path(&b, 7, 10).unwrap();
        let r2 = sample_path(&b, 7, 10).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.len(), 10);
        assert_ne!(sample_path(&b, 8, 64).unwrap().trajectory, sample_path(&b, 7, 64).unwrap().trajectory);
    }

    #[test]
    fn support_is_respected() {
        let g = Sft::new(2, &[vec![1, 1], vec![1, 0]]).unwrap();
        let run = sample_path(&parry_measure(&g).unwrap(), 3, 20_000).unwrap();
        assert!(run.trajectory.windows(2).all(|w| w != [1, 1]));
        let id = MarkovChain::from_dense(vec![0.5, 0.5], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(sample_path(&id, 0, 5), Err(Error::NotErgodic));
    }

    #[test]
    fn deterministic_chain() {
        let swap = MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let run = sample_path(&swap, 1, 1000).unwrap();
        assert!(run.trajectory.windows(2).all(|w| w[0] != w[1]));
        let e = empirical_entropy(&run, 3).unwrap();
        assert!(e.value.abs() < 1e-12);
        assert_eq!(
            empirical_entropy(&run, 8),
            Err(Error::InsufficientData { needed: 25_600, got: 1000 })
        );
    }

    #[test]
    fn bernoulli_estimates() {
        let b = bernoulli_half();
        let run = sample_path(&b, 11, 200_000).unwrap();
        let e = empirical_entropy(&run, 2).unwrap();
        assert!(e.agrees_with(2f64.ln(), 4.0), "{e:?}");
        let full = Sft::full(2).unwrap();
        let phi = RoofFn::from_symbol_values(&full, &[1.0, 2.0]).unwrap();
        let r = empirical_roof_integral(&run, &phi).unwrap();
        assert!(r.agrees_with(1.5, 4.0), "{r:?}");
        let c = RoofFn::constant(&full, 2.5).unwrap();
        assert_eq!(empirical_roof_integral(&run, &c).unwrap(), Estimate { value: 2.5, stderr: 0.0 });
    }

    #[test]
    fn cylinder_diff() {
        let full = Sft::full(2).unwrap();
        let b = bernoulli_half();
        let c = MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        assert_eq!(brute_force_cylinder_diff(&full, |w| b.word_measure(w), |w| b.word_measure(w), 4), 0.0);
        assert!(brute_force_cylinder_diff(&full, |w| b.word_measure(w), |w| c.word_measure(w), 4) > 0.1);
    }
}
