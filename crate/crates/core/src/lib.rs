//! Kicked-rotor open-system simulator: Floquet evolution of a qubit (or
//! qubit pair) coupled to a quantised kicked rotor, reduced-density-matrix
//! diagnostics, a dense static-Hamiltonian reference and stochastic sums.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod density;
pub mod error;
pub mod fft;
pub mod linalg;
pub mod metrics;
pub mod numeric;
pub mod oracle;
pub mod qkr;
pub mod rdm;
pub mod rng;
pub mod series;
pub mod state;
pub mod stochastic;

pub use error::{Error, Result};
