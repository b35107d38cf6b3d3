//! Major-to-minor translation (M2m) over-sampling for class-imbalanced
//! classification.
//!
//! This crate is `no_std` (with `alloc`) and holds every algorithmic piece:
//!
//! - [`netcore`]: a small dense-network engine with parameter and input
//!   gradients, SGD with momentum and learning-rate schedules.
//! - [`datasets`]: labeled datasets, synthetic generators, long-tail
//!   subsampling and balanced splits.
//! - [`rebalance`]: re-sampling, SMOTE, re-weighting and deferred scheduling.
//! - [`m2m`]: translation of majority seeds into synthetic minority samples,
//!   the rejection rule and the seed-class distribution.
//! - [`train`]: the training loop shared by every strategy.
//! - [`metrics`]: balanced accuracy, geometric-mean recall and related curves.
//!
//! File formats, configuration and the command-line runner live in the
//! companion `m2m` crate.
//!
//! Class indices are zero-based everywhere: class `0` is the most frequent
//! training class.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod datasets;
mod error;
pub mod m2m;
pub mod math;
pub mod metrics;
pub mod netcore;
pub mod rebalance;
pub mod rng;
pub mod train;

pub use error::{Error, Result};
