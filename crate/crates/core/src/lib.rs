//! Rate, distortion and information-leakage regions for lossy source coding
//! with side information at the encoder and an eavesdropper, plus exact
//! small-blocklength checks of the random-binning key mechanisms.

// Negated float comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod prob;
pub mod rd;
pub mod regions;
pub mod sim;
pub mod sources;

pub use error::{Error, Result};
