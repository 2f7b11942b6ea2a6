//! Bipartite pure states on system ⊗ environment.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{complex_gaussian, seeded_rng};

/// Pure state of the total system, stored as a `d_s × d_e` row-major table.
///
/// Row `i` holds the (unnormalised) environment component attached to the
/// system basis vector `i`; the flattened index `i * d_e + n` agrees with the
/// Kronecker ordering `system ⊗ environment`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d_s: usize,
    d_e: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(d_s: usize, d_e: usize, amps: Vec<Complex64>) -> Result<Self> {
        if d_s == 0 || d_e == 0 {
            return Err(Error::InvalidState("dimensions must be positive".into()));
        }
        if amps.len() != d_s * d_e {
            return Err(Error::InvalidState(alloc::format!("expected {} amplitudes, got {}", d_s * d_e, amps.len())));
        }
        Ok(Self { d_s, d_e, amps })
    }

    pub fn zeros(d_s: usize, d_e: usize) -> Self {
        Self { d_s, d_e, amps: vec![Complex64::new(0.0, 0.0); d_s * d_e] }
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn amp(&self, i: usize, n: usize) -> Complex64 {
        self.amps[i * self.d_e + n]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.amps[i * self.d_e..(i + 1) * self.d_e]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.amps[i * self.d_e..(i + 1) * self.d_e]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { d_s: self.d_s, d_e: self.d_e, amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero or non-finite state".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }
}

/// `√(Σ |amps|²)`.
pub fn norm(state: &StateVector) -> f64 {
    libm::sqrt(state.amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
}

/// Normalised product state `system ⊗ env`.
pub fn make_product_state(system_amps: &[Complex64], env_amps: &[Complex64]) -> Result<StateVector> {
    let ns = libm::sqrt(system_amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
    let ne = libm::sqrt(env_amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
    if !(ns > 0.0) || !(ne > 0.0) {
        return Err(Error::InvalidState("product factors must be nonzero".into()));
    }
    let scale = 1.0 / (ns * ne);
    let amps = system_amps.iter().flat_map(|s| env_amps.iter().map(move |e| s * e * scale)).collect();
    StateVector::from_amplitudes(system_amps.len(), env_amps.len(), amps)
}

/// Normalise a vector of amplitudes in place; returns the norm it had.
pub fn normalize_in_place(v: &mut [Complex64]) -> f64 {
    let n = libm::sqrt(v.iter().map(|a| a.norm_sqr()).sum::<f64>());
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
    n
}

/// Haar-random unit vector in `C^d_e`: independent standard complex
/// Gaussians, normalised. Deterministic in `seed`.
pub fn haar_random_env(d_e: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = seeded_rng(seed);
    let mut v: Vec<Complex64> = (0..d_e).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    normalize_in_place(&mut v);
    v
}
