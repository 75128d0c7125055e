//! Optimal Hardy weights for second-order elliptic operators.
//!
//! Build weights from pairs of positive solutions, solve the radial problem for
//! `-Δ + V(|x|)`, and check optimality, spectral and inequality claims numerically.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agmon;
pub mod catalog;
pub mod cli;
pub mod construct;
pub mod error;
pub mod numgrid;
pub mod radial;
pub mod spectral;
pub mod varify;

pub use error::{Error, Result};
