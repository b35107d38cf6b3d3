//! Experiment harness for M2m over-sampling: TOML configs, multi-seed runs,
//! hyperparameter sweeps, result tables and the dataset/checkpoint file
//! formats. The algorithms live in [`m2m_core`].

pub mod config;
pub mod error;
pub mod harness;
pub mod io;

pub use error::{Error, Result};
pub use m2m_core;
