//! Rigorous numerics for the multiplicative golden mean shift: the set of
//! binary sequences with `x_k x_{2k} = 0` for every `k`.

// `!(x > 0.0)` style guards reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod golden;
pub mod measures;
pub mod report;
pub mod word;

pub use error::{Error, Result};
pub use word::BinaryWord;

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
