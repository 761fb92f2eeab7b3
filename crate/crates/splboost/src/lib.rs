//! Data handling, experiment harness and file formats around
//! [`splboost_core`].
//!
//! - [`data`]: CSV loading, the two-Gaussian synthetic generator, label noise,
//!   train/test splits and CV folds.
//! - [`experiment`]: lambda/rounds cross-validation, single runs, repeated
//!   studies and rank statistics.
//! - [`report`]: TSV and JSON Lines writers.
//! - [`rng`]: the seeded generator every randomized step uses.

pub mod data;
pub mod error;
pub mod experiment;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
