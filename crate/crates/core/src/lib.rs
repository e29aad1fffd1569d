//! Markov measures of prescribed entropy for suspension flows over
//! subshifts of finite type.
//!
//! The crate covers the symbolic toolkit (shifts, Perron data, Markov and
//! Parry measures), the combinatorial recodings that turn a finite-window
//! roof into a constant one, and the synthesis pipeline that solves for an
//! ergodic measure with a requested flow entropy.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod block_recode;
pub mod entropy_path;
pub mod error;
pub mod markov;
pub mod oracle;
pub mod perron;
pub mod roof_flatten;
pub mod sft;
pub mod suspension;
pub mod synthesis;

pub use error::{Error, Result};

/// Library version recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use markov::{parry_from_perron, parry_measure, stationary_of, validate_chain, MarkovChain};
pub use perron::{perron_data, top_entropy_sft, PerronData};
pub use sft::{Cylinder, Sft, Word};
pub use block_recode::{build_recode, BlockRecode};
pub use entropy_path::EntropyPath;
pub use roof_flatten::{build_flatten, FlattenModel};
pub use suspension::{abramov_entropy, flow_top_entropy_bounds, roof_integral, RoofFn};
pub use synthesis::{synthesize, synthesize_with, SynthesisOptions, SynthesisReport};
