//! Fourier analysis of functions on the Boolean hypercube `{-1,1}^n`, noise
//! stability and noisy influence, energy-increment decision-tree
//! decompositions into subfunctions with small noisy influences, quasirandomness
//! testing and an empirical Majority-is-Stablest checker.
//!
//! Input index convention used throughout: bit `i` of a table index is `0`
//! when `x_i = +1` and `1` when `x_i = -1`. Variable indices are zero-based in
//! the library API.

// Negated comparisons reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boolfn;
pub mod dtree;
mod error;
pub mod gauss_mist;
pub mod noise;
pub mod quasirandom;
pub mod regularity;

pub use boolfn::{BooleanFunction, FourierExpansion, RangeTag, Sign};
pub use dtree::{DecisionTree, EnergyLedger, LeafId};
pub use error::{Error, Result};
pub use regularity::{DecompositionResult, RegularityParams};

/// Absolute slack used when comparing an influence or coefficient against a
/// threshold: values within this distance above the threshold count as below it.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// Tolerance for the `E[f^2] <= 1` entry check of the decompositions.
pub const NORM_TOLERANCE: f64 = 1e-9;
