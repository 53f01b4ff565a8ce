//! Exact continued-fraction expansions of strong Engel series with signs.
//!
//! A strong Engel series `p/q + sum eps_j / x_j` (with `x_j^2 | x_(j+1)`)
//! has a continued fraction that is built by repeatedly folding the
//! expansion of the previous partial sum. This crate generates the integer
//! sequences of Lüroth-type families, performs the folding with exact
//! arithmetic, checks it against the Euclidean algorithm and estimates
//! irrationality exponents from the convergent denominators.

pub mod builtins;
pub mod cf;
pub mod dioph;
pub mod error;
pub mod exact;
pub mod expand;
pub mod fold;
pub mod interval;
pub mod series;
pub(crate) mod serde_int;

pub use cf::{ContinuedFraction, Convergent, Word};
pub use error::{Error, Result};
pub use exact::{Int, Rat};
pub use fold::{fold, FoldStep, Sign};
pub use series::{SeriesSpec, SeriesState};
