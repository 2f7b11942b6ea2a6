//! Experiment runner around `spb-core`: JSON configs, single runs, sweeps,
//! oracle and stochastic suites, and their CSV/JSON outputs.

pub mod analysis;
pub mod config;
pub mod error;
pub mod output;
pub mod runs;
pub mod suites;

pub use error::{Error, Result};
