//! Subshifts of finite type and their word combinatorics.
//!
//! An [`Sft`] is stored as sorted successor lists so that very sparse
//! transition graphs (such as the chain-split shifts built by
//! [`crate::roof_flatten`]) stay cheap. Dense 0-1 rows are accepted and
//! produced at the boundary.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// A finite word over the alphabet `{0, .., k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for Word {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl From<&[usize]> for Word {
    fn from(v: &[usize]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The cylinder `[w_0 .. w_{n-1}]_offset` of an ambient shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    word: Word,
    offset: i64,
}

impl Cylinder {
    /// Builds a cylinder, rejecting words that are not admissible in `sft`.
    pub fn new(sft: &Sft, word: impl Into<Word>, offset: i64) -> Result<Self> {
        let word = word.into();
        if word.is_empty() {
            return Err(Error::NotAdmissible("empty word".into()));
        }
        if !sft.is_admissible(&word)? {
            return Err(Error::NotAdmissible(word.to_string()));
        }
        Ok(Cylinder { word, offset })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }
}

/// A subshift of finite type given by a 0-1 transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    k: usize,
    succ: Vec<Vec<usize>>,
}

impl Sft {
    /// Validates a dense `k x k` 0-1 matrix.
    pub fn new(k: usize, rows: &[Vec<i64>]) -> Result<Self> {
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
        let mut succ = vec![Vec::new(); k];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                match value {
                    0 => {}
                    1 => succ[i].push(j),
                    _ => {
                        return Err(Error::NonBinaryEntry {
                            row: i,
                            col: j,
                            value,
                        })
                    }
                }
            }
        }
        Self::from_successors(succ)
    }

    /// Builds a shift from an edge list; duplicate edges are merged.
    pub fn from_edges(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let mut succ = vec![Vec::new(); k];
        for (i, j) in edges {
            for s in [i, j] {
                if s >= k {
                    return Err(Error::SymbolOutOfRange { symbol: s, k });
                }
            }
            succ[i].push(j);
        }
        for row in succ.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        Self::from_successors(succ)
    }

    fn from_successors(succ: Vec<Vec<usize>>) -> Result<Self> {
        let k = succ.len();
        let mut has_pred = vec![false; k];
        for (i, row) in succ.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::StrandedSymbol {
                    symbol: i,
                    direction: "outgoing",
                });
            }
            for &j in row {
                has_pred[j] = true;
            }
        }
        if let Some(j) = has_pred.iter().position(|&p| !p) {
            return Err(Error::StrandedSymbol {
                symbol: j,
                direction: "incoming",
            });
        }
        Ok(Sft { k, succ })
    }

    /// The full shift on `k` symbols.
    pub fn full(k: usize) -> Result<Self> {
        Self::new(k, &vec![vec![1; k]; k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        i < self.k && self.succ[i].binary_search(&j).is_ok()
    }

    /// Sorted successors of symbol `i`.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.succ[i].len()
    }

    /// Dense 0-1 rows.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        let mut rows = vec![vec![0; self.k]; self.k];
        for (i, row) in self.succ.iter().enumerate() {
            for &j in row {
                rows[i][j] = 1;
            }
        }
        rows
    }

    /// Predecessor lists, sorted.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.k];
        for (i, row) in self.succ.iter().enumerate() {
            for &j in row {
                pred[j].push(i);
            }
        }
        pred
    }

    fn check_symbols(&self, w: &[usize]) -> Result<()> {
        match w.iter().find(|&&s| s >= self.k) {
            Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, k: self.k }),
            None => Ok(()),
        }
    }

    /// Whether every consecutive pair of `w` is an allowed transition.
    /// Words of length 0 and 1 are admissible.
    pub fn is_admissible(&self, w: &[usize]) -> Result<bool> {
        self.check_symbols(w)?;
        Ok(w.windows(2).all(|p| self.allowed(p[0], p[1])))
    }

    /// All admissible words of length `n`, in lexicographic order.
    pub fn admissible_words(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        let mut stack = Vec::with_capacity(n);
        for start in 0..self.k {
            stack.push(start);
            self.extend_words(&mut stack, n, &mut out);
            stack.pop();
        }
        out
    }

    fn extend_words(&self, stack: &mut Vec<usize>, n: usize, out: &mut Vec<Word>) {
        if stack.len() == n {
            out.push(Word(stack.clone()));
            return;
        }
        let last = *stack.last().unwrap();
        for &next in &self.succ[last] {
            stack.push(next);
            self.extend_words(stack, n, out);
            stack.pop();
        }
    }

    /// Number of admissible words of length `n` without listing them.
    pub fn count_words(&self, n: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        let mut ways = vec![1u128; self.k];
        for _ in 1..n {
            let mut next = vec![0u128; self.k];
            for (i, row) in self.succ.iter().enumerate() {
                for &j in row {
                    next[j] += ways[i];
                }
            }
            ways = next;
        }
        ways.iter().sum()
    }

    /// Strong connectivity of the transition graph.
    pub fn is_irreducible(&self) -> bool {
        is_strongly_connected(&self.succ)
    }

    /// Gcd of the cycle lengths of an irreducible shift.
    pub fn period(&self) -> Result<usize> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let levels = bfs_levels(&self.succ, 0);
        let mut g = 0usize;
        for (u, row) in self.succ.iter().enumerate() {
            for &v in row {
                let lu = levels[u].expect("irreducible graph is fully reachable");
                let lv = levels[v].expect("irreducible graph is fully reachable");
                let diff = (lu as i64 + 1 - lv as i64).unsigned_abs() as usize;
                g = gcd(g, diff);
            }
        }
        Ok(g)
    }

    pub fn is_aperiodic(&self) -> Result<bool> {
        Ok(self.period()? == 1)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bfs_levels(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut levels = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    levels[start] = Some(0);
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        let next = levels[u].unwrap() + 1;
        for &v in &adj[u] {
            if levels[v].is_none() {
                levels[v] = Some(next);
                queue.push_back(v);
            }
        }
    }
    levels
}

/// Strong connectivity of a directed graph given by adjacency lists.
pub(crate) fn is_strongly_connected(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    if n == 0 {
        return false;
    }
    if bfs_levels(adj, 0).iter().any(Option::is_none) {
        return false;
    }
    let mut rev = vec![Vec::new(); n];
    for (u, row) in adj.iter().enumerate() {
        for &v in row {
            rev[v].push(u);
        }
    }
    bfs_levels(&rev, 0).iter().all(Option::is_some)
}
