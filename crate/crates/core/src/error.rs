use thiserror::Error;

/// Errors raised by the symbolic-dynamics toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entry ({row}, {col}) = {value} is not 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },

    #[error("symbol {symbol} has no {direction} transition")]
    StrandedSymbol {
        symbol: usize,
        direction: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("symbol {symbol} out of range for alphabet of size {k}")]
    SymbolOutOfRange { symbol: usize, k: usize },

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("row {row} is not stochastic (sum = {sum})")]
    NotStochastic { row: usize, sum: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("vector is not stationary (max residual {residual:e})")]
    NotStationary { residual: f64 },

    #[error("transition {from} -> {to} carries mass but is forbidden by the shift")]
    SupportViolation { from: usize, to: usize },

    #[error("parameter `{name}` = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error(
        "target entropy {target} must lie strictly between 0 and the top entropy, \
         which is bracketed by [{top_lo}, {top_hi}]"
    )]
    TargetOutOfRange {
        target: f64,
        top_lo: f64,
        top_hi: f64,
    },

    #[error("no bracketing sign change found on a grid of {grid} intervals")]
    BracketNotFound { grid: usize },

    #[error("endpoint bracketing failed after {attempts} attempts (last eta {eta:e})")]
    BracketFailure { attempts: usize, eta: f64 },

    #[error("word is not admissible: {0}")]
    NotAdmissible(String),

    #[error("adjacent blocks at position {position} do not overlap consistently")]
    InconsistentOverlap { position: usize },

    #[error("roof window ({left}, {right}) does not fit in blocks of length {n}")]
    WindowTooWide { left: usize, right: usize, n: usize },

    #[error("phase {phase} out of range for symbol {symbol} with chain length {len}")]
    PhaseOutOfRange {
        symbol: usize,
        phase: usize,
        len: usize,
    },

    #[error("measure is not ergodic")]
    NotErgodic,

    #[error("invalid roof function: {0}")]
    InvalidRoof(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
