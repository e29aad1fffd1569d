//! Higher-block recoding: the shift on admissible `n`-blocks and the
//! sliding-block conjugacy onto it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::markov::MarkovChain;
use crate::sft::{Sft, Word};
use crate::suspension::RoofFn;

/// The `n`-block presentation `A_n` of a shift. Block `i` is `gamma[i]`;
/// blocks are listed in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRecode {
    source: Sft,
    n: usize,
    target: Sft,
    gamma: Vec<Word>,
    index: HashMap<Vec<usize>, usize>,
}

/// Builds `A_n`: block `b_i` may be followed by `b_j` iff `b_i[1..] == b_j[..n-1]`.
pub fn build_recode(s: &Sft, n: usize) -> Result<BlockRecode> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "block length",
            value: n as f64,
        });
    }
    let gamma = s.admissible_words(n);
    let index: HashMap<Vec<usize>, usize> = gamma
        .iter()
        .enumerate()
        .map(|(i, w)| (w.to_vec(), i))
        .collect();
    let mut edges = Vec::new();
    let mut key = vec![0; n];
    for (i, b) in gamma.iter().enumerate() {
        key[..n - 1].copy_from_slice(&b[1..]);
        for &c in s.successors(b[n - 1]) {
            key[n - 1] = c;
            edges.push((i, index[&key]));
        }
    }
    let target = Sft::from_edges(gamma.len(), edges)?;
    Ok(BlockRecode {
        source: s.clone(),
        n,
        target,
        gamma,
        index,
    })
}

impl BlockRecode {
    pub fn source(&self) -> &Sft {
        &self.source
    }

    pub fn target(&self) -> &Sft {
        &self.target
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &[Word] {
        &self.gamma
    }

    /// Position of coordinate 0 inside a block.
    pub fn anchor(&self) -> usize {
        (self.n - 1) / 2
    }

    /// Index of an `n`-block, if admissible.
    pub fn block_index(&self, block: &[usize]) -> Option<usize> {
        self.index.get(block).copied()
    }

    /// Slides an `n`-window along `w`; symbol `l` of the result is the block
    /// starting at position `l`.
    pub fn encode_word(&self, w: &[usize]) -> Result<Word> {
        if w.len() < self.n {
            return Err(Error::NotAdmissible(format!(
                "word of length {} is shorter than the block length {}",
                w.len(),
                self.n
            )));
        }
        if !self.source.is_admissible(w)? {
            return Err(Error::NotAdmissible(format!("{} in the source shift", Word::from(w))));
        }
        Ok(w.windows(self.n).map(|b| self.index[b]).collect::<Vec<_>>().into())
    }

    /// Inverse of [`encode_word`](Self::encode_word).
    pub fn decode_word(&self, w: &[usize]) -> Result<Word> {
        let Some(&first) = w.first() else {
            return Err(Error::NotAdmissible("empty block word".into()));
        };
        let k = self.gamma.len();
        if let Some(&bad) = w.iter().find(|&&x| x >= k) {
            return Err(Error::SymbolOutOfRange { symbol: bad, k });
        }
        let mut out = self.gamma[first].to_vec();
        for (pos, pair) in w.windows(2).enumerate() {
            let (a, b) = (&self.gamma[pair[0]], &self.gamma[pair[1]]);
            if a[1..] != b[..self.n - 1] {
                return Err(Error::InconsistentOverlap { position: pos });
            }
            out.push(b[self.n - 1]);
        }
        Ok(out.into())
    }

    /// The image of `mc` on `A_n`: `p*_i = μ[gamma_i]` and
    /// `p*_ij = p_{last(b_i), last(b_j)}` on overlapping pairs.
    pub fn pushforward_chain(&self, mc: &MarkovChain) -> Result<MarkovChain> {
        mc.check_support(&self.source)?;
        let p: Vec<f64> = self.gamma.iter().map(|b| mc.word_measure(b)).collect();
        let total: f64 = p.iter().sum();
        let p = p.into_iter().map(|x| x / total).collect();
        let rows = (0..self.gamma.len())
            .map(|i| {
                let last = self.gamma[i][self.n - 1];
                let mut row: Vec<(usize, f64)> = self
                    .target
                    .successors(i)
                    .iter()
                    .map(|&j| (j, mc.prob(last, self.gamma[j][self.n - 1])))
                    .filter(|e| e.1 > 0.0)
                    .collect();
                let sum: f64 = row.iter().map(|e| e.1).sum();
                row.iter_mut().for_each(|e| e.1 /= sum);
                row
            })
            .collect();
        MarkovChain::new(p, rows)
    }

    /// `φ ∘ g_n^{-1}` as a 0-window roof on `A_n`. The window of `φ` must fit
    /// inside a block around the anchor.
    pub fn lift_roof(&self, roof: &RoofFn) -> Result<RoofFn> {
        if roof.ambient() != &self.source {
            return Err(Error::InvalidRoof("roof is defined over a different shift".into()));
        }
        let (left, right) = roof.window();
        let anchor = self.anchor();
        if left > anchor || anchor + right >= self.n {
            return Err(Error::WindowTooWide {
                left,
                right,
                n: self.n,
            });
        }
        let values: Vec<f64> = self
            .gamma
            .iter()
            .map(|b| roof.value(&b[anchor - left..=anchor + right]).expect("subword of an admissible block"))
            .collect();
        RoofFn::from_symbol_values(&self.target, &values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::parry_measure;
    use crate::perron::top_entropy_sft;
    use crate::suspension::roof_integral;
    use std::collections::BTreeMap;

    fn golden() -> Sft {
        Sft::new(2, &[vec![1, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn golden_two_blocks() {
        let r = build_recode(&golden(), 2).unwrap();
        assert_eq!(r.target().k(), 3);
        let g: Vec<Vec<usize>> = r.gamma().iter().map(|w| w.to_vec()).collect();
        assert_eq!(g, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert!(r.target().is_irreducible());
        let h = top_entropy_sft(r.target()).unwrap();
        assert!((h - top_entropy_sft(&golden()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn de_bruijn() {
        let r = build_recode(&Sft::full(2).unwrap(), 2).unwrap();
        assert_eq!(r.target().k(), 4);
        assert_eq!(r.target().edge_count(), 8);
        assert!((top_entropy_sft(r.target()).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn encode_decode() {
        let r = build_recode(&golden(), 2).unwrap();
        assert_eq!(r.encode_word(&[0, 1, 0]).unwrap().to_vec(), vec![1, 2]);
        assert_eq!(r.decode_word(&[1, 2]).unwrap().to_vec(), vec![0, 1, 0]);
        assert_eq!(r.decode_word(&[2]).unwrap().to_vec(), vec![1, 0]);
        assert!(matches!(r.encode_word(&[0]), Err(Error::NotAdmissible(_))));
        assert!(matches!(r.encode_word(&[1, 1, 0]), Err(Error::NotAdmissible(_))));
        assert_eq!(r.decode_word(&[2, 2]), Err(Error::InconsistentOverlap { position: 0 }));

        let f = build_recode(&Sft::full(2).unwrap(), 2).unwrap();
        assert_eq!(f.encode_word(&[0, 0, 0]).unwrap().to_vec(), vec![0, 0]);

        let r3 = build_recode(&golden(), 3).unwrap();
        for w in r3.target().admissible_words(5) {
            let src = r3.decode_word(&w).unwrap();
            assert_eq!(src.len(), 7);
            assert!(golden().is_admissible(&src).unwrap());
            assert_eq!(r3.encode_word(&src).unwrap(), w);
        }
    }

    #[test]
    fn pushforward_examples() {
        let full = Sft::full(2).unwrap();
        let r = build_recode(&full, 2).unwrap();
        let b = MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let pb = r.pushforward_chain(&b).unwrap();
        assert!(pb.p().iter().all(|&x| (x - 0.25).abs() < 1e-15));
        for i in 0..4 {
            assert_eq!(pb.row(i).len(), 2);
            assert!(pb.row(i).iter().all(|e| (e.1 - 0.5).abs() < 1e-15));
        }

        let g = golden();
        let parry = parry_measure(&g).unwrap();
        let pp = build_recode(&g, 2).unwrap().pushforward_chain(&parry).unwrap();
        assert!((pp.entropy() - parry.entropy()).abs() < 1e-12);

        let swap = MarkovChain::from_dense(vec![0.5, 0.5], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ps = r.pushforward_chain(&swap).unwrap();
        assert_eq!(ps.entropy(), 0.0);
    }

    #[test]
    fn lifted_roofs() {
        let g = golden();
        let r3 = build_recode(&g, 3).unwrap();
        let mut t = BTreeMap::new();
        t.insert(vec![0, 0], 1.0);
        t.insert(vec![0, 1], 1.5);
        t.insert(vec![1, 0], 3.0);
        let phi = RoofFn::new(&g, 0, 1, t).unwrap();
        let lifted = r3.lift_roof(&phi).unwrap();
        assert_eq!(lifted.window(), (0, 0));
        assert_eq!(lifted.table().len(), 5);
        for (i, b) in r3.gamma().iter().enumerate() {
            assert_eq!(lifted.value(&[i]), phi.value(&b[1..3]));
        }
        let parry = parry_measure(&g).unwrap();
        let a = roof_integral(&phi, &parry).unwrap();
        let b = roof_integral(&lifted, &r3.pushforward_chain(&parry).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-12);

        let wide = phi.padded(1, 1).unwrap();
        let r2 = build_recode(&g, 2).unwrap();
        assert_eq!(r2.lift_roof(&wide), Err(Error::WindowTooWide { left: 1, right: 1, n: 2 }));

        let c = RoofFn::constant(&g, 2.0).unwrap();
        assert_eq!(r2.lift_roof(&c).unwrap().constant_value(), Some(2.0));
    }
}
