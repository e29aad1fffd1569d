//! On-disk formats. Every file is a JSON object with a `format_version`.
//! Floats are written in shortest round-trip form, so re-reading a report
//! reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use symflow::{MarkovChain, RoofFn, Sft};

pub const FORMAT_VERSION: u32 = 1;

/// Unreadable or invalid input file.
#[derive(Debug)]
pub struct ParseError {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}:{}: {}", self.path, self.line, self.column, self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    pub fn semantic(path: &Path, message: impl fmt::Display) -> Self {
        ParseError {
            path: path.display().to_string(),
            line: 0,
            column: 0,
            message: message.to_string(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::semantic(path, e))?;
    parse_json(path, &text)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_version(path: &Path, v: u32) -> Result<(), ParseError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(ParseError::semantic(path, format!("unsupported format_version {v}")))
    }
}

/// Words are digit strings when `k <= 10`, comma-separated integers otherwise.
pub fn word_to_string(w: &[usize], k: usize) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    if k <= 10 {
        parts.concat()
    } else {
        parts.join(",")
    }
}

pub fn word_from_string(s: &str, k: usize) -> Result<Vec<usize>, String> {
    let symbols: Result<Vec<usize>, String> = if k <= 10 {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| format!("bad symbol {c:?} in word {s:?}")))
            .collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad symbol {p:?} in word {s:?}")))
            .collect()
    };
    let symbols = symbols?;
    if symbols.is_empty() {
        return Err("empty word".into());
    }
    if let Some(&x) = symbols.iter().find(|&&x| x >= k) {
        return Err(format!("symbol {x} in word {s:?} is out of range for k = {k}"));
    }
    Ok(symbols)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub format_version: u32,
    pub k: usize,
    pub rows: Vec<Vec<i64>>,
}

impl MatrixFile {
    pub fn load(path: &Path) -> Result<(Self, Sft), ParseError> {
        let m: MatrixFile = read_json(path)?;
        let s = m.to_sft(path)?;
        Ok((m, s))
    }

    pub fn to_sft(&self, path: &Path) -> Result<Sft, ParseError> {
        check_version(path, self.format_version)?;
        Sft::new(self.k, &self.rows).map_err(|e| ParseError::semantic(path, e))
    }

    pub fn from_sft(s: &Sft) -> Self {
        MatrixFile {
            format_version: FORMAT_VERSION,
            k: s.k(),
            rows: s.rows(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoofFile {
    pub format_version: u32,
    pub window: [usize; 2],
    pub table: BTreeMap<String, f64>,
}

impl RoofFile {
    pub fn load(path: &Path, s: &Sft) -> Result<(Self, RoofFn), ParseError> {
        let r: RoofFile = read_json(path)?;
        let roof = r.to_roof(path, s)?;
        Ok((r, roof))
    }

    pub fn to_roof(&self, path: &Path, s: &Sft) -> Result<RoofFn, ParseError> {
        check_version(path, self.format_version)?;
        let mut table = BTreeMap::new();
        for (w, &v) in &self.table {
            let word = word_from_string(w, s.k()).map_err(|e| ParseError::semantic(path, e))?;
            table.insert(word, v);
        }
        RoofFn::new(s, self.window[0], self.window[1], table).map_err(|e| ParseError::semantic(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainJson {
    pub p: Vec<f64>,
    #[serde(rename = "P")]
    pub matrix: Vec<Vec<f64>>,
}

impl From<&MarkovChain> for ChainJson {
    fn from(mc: &MarkovChain) -> Self {
        ChainJson {
            p: mc.p().to_vec(),
            matrix: mc.dense_matrix(),
        }
    }
}

impl ChainJson {
    pub fn to_chain(&self) -> symflow::Result<MarkovChain> {
        MarkovChain::from_dense(self.p.clone(), &self.matrix)
    }
}

/// Chain export: `{format_version, p, P, entropy, ergodic}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub format_version: u32,
    #[serde(flatten)]
    pub chain: ChainJson,
    pub entropy: f64,
    pub ergodic: bool,
}

impl From<&MarkovChain> for ChainFile {
    fn from(mc: &MarkovChain) -> Self {
        ChainFile {
            format_version: FORMAT_VERSION,
            chain: mc.into(),
            entropy: mc.entropy(),
            ergodic: mc.is_ergodic(),
        }
    }
}

/// Everything a synthesis run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisInputs {
    pub matrix: MatrixFile,
    pub roof: RoofFile,
    pub target: f64,
    pub tol: f64,
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format_version: u32,
    pub library_version: String,
    /// SHA-256 of the canonical JSON of `inputs`.
    pub inputs_hash: String,
    pub inputs: SynthesisInputs,
    pub n_used: usize,
    /// The `N`-blocks indexing the chain's states.
    pub gamma: Vec<String>,
    /// Roof lifted to the `N`-block shift, one value per block.
    pub lifted_roof: Vec<f64>,
    pub tau: f64,
    pub l: Vec<usize>,
    #[serde(rename = "L")]
    pub num_states: usize,
    pub t_star: f64,
    pub chain: ChainJson,
    pub achieved: f64,
    pub target: f64,
    pub eta_used: f64,
    pub delta_used: f64,
    pub bracket: [f64; 2],
    pub top_entropy_bounds: [f64; 2],
    pub ergodic: bool,
}
