//! Self-paced boosting.
//!
//! SPLBoost augments discrete AdaBoost with per-sample latent weights `v_i`
//! produced by a self-paced regularizer: samples whose exponential loss exceeds
//! the age parameter `lambda` are dropped from (or down-weighted in) the next
//! weak-learner fit. This crate holds the numerical core and depends only on
//! `alloc`:
//!
//! - [`regularizer`]: the four regularizers, their closed-form latent weights
//!   and latent losses, plus a brute-force grid oracle.
//! - [`tree`]: weighted decision trees and exhaustive stump enumeration.
//! - [`boost`]: the AdaBoost / SPLBoost training loop and its per-round trace.
//! - [`diagnostics`]: effective-weight and latent-loss curves, objective
//!   trajectories and rejected-sample reports.
//!
//! File formats, data generation and the experiment harness live in the
//! `splboost` crate.

#![no_std]

extern crate alloc;

pub mod boost;
pub mod dataset;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod regularizer;
pub mod tree;

pub use boost::{train, BoostConfig, LearnerSearch, RoundRecord, TrainTrace};
pub use dataset::{Dataset, Label};
pub use ensemble::{Ensemble, Margin, Stage};
pub use error::{Error, Result};
pub use regularizer::{RegularizerKind, SpRegularizer};
pub use tree::{SplitCriterion, TreeNode, TreeParams, WeakLearner};
