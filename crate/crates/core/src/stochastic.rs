//! Monte Carlo checks of random-coefficient limits: weighted quadratic sums
//! `(1/d) Σ_n h_n X*_jn X_in` of independent complex Gaussian rows.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid_input, Result};
use crate::linalg::{unitarity_defect, CMatrix, CVector};
use crate::metrics::{loglog_slope, ScalingFit};
use crate::numeric::{CompensatedComplexSum, CompensatedSum};
use crate::rng::{complex_gaussian, derive_seed, seeded_rng};

/// Rows `X_i` of `d` independent complex Gaussians with `⟨|X_in|²⟩ = σ_i²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEnsemble {
    d: usize,
    sigmas: Vec<f64>,
    rows: Vec<Vec<Complex64>>,
    seed: u64,
}

impl CoefficientEnsemble {
    pub fn new(d: usize, sigmas: &[f64], seed: u64) -> Result<Self> {
        check_sigmas(sigmas)?;
        if d == 0 {
            return Err(invalid_input!("ensemble dimension must be positive"));
        }
        let mut rng = seeded_rng(seed);
        let rows = sigmas.iter().map(|s| (0..d).map(|_| complex_gaussian(&mut rng, s * s)).collect()).collect();
        Ok(Self { d, sigmas: sigmas.to_vec(), rows, seed })
    }

    /// Wraps an explicit table; rows must share one length.
    pub fn from_rows(sigmas: &[f64], rows: Vec<Vec<Complex64>>) -> Result<Self> {
        check_sigmas(sigmas)?;
        let d = rows.first().map_or(0, Vec::len);
        if rows.len() != sigmas.len() || d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(invalid_input!("table shape does not match {} sigmas", sigmas.len()));
        }
        Ok(Self { d, sigmas: sigmas.to_vec(), rows, seed: 0 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.rows.len() || j >= self.rows.len() {
            return Err(invalid_input!("pair ({i}, {j}) outside {} rows", self.rows.len()));
        }
        Ok(())
    }
}

fn check_sigmas(sigmas: &[f64]) -> Result<()> {
    let total: f64 = sigmas.iter().map(|s| s * s).sum();
    if sigmas.is_empty() || (total - 1.0).abs() > 1e-8 {
        return Err(invalid_input!("Σσ² = {total}, expected 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumSpec {
    /// Uniform on `[−1, 1]`, redrawn per dimension from the seed.
    BoundedRandom {
        seed: u64,
    },
    /// `h_n = cos(2πn/d)`, `n = 1..d`.
    Cosine,
    Constant(f64),
    /// `h_n = (n/d)^s`: the slowly growing spectrum `n^s` rescaled by `d^s`.
    PowerGrowth {
        exponent: f64,
    },
}

impl SpectrumSpec {
    pub fn values(&self, d: usize) -> Vec<f64> {
        match *self {
            SpectrumSpec::BoundedRandom { seed } => {
                let mut rng = seeded_rng(derive_seed(seed, d as u64));
                (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect()
            }
            SpectrumSpec::Cosine => {
                (1..=d).map(|n| libm::cos(2.0 * core::f64::consts::PI * n as f64 / d as f64)).collect()
            }
            SpectrumSpec::Constant(c) => alloc::vec![c; d],
            SpectrumSpec::PowerGrowth { exponent } => {
                (1..=d).map(|n| libm::pow(n as f64 / d as f64, exponent)).collect()
            }
        }
    }
}

/// `(1/d) Σ_n h_n X*_jn X_in`.
pub fn weighted_quadratic(
    ensemble: &CoefficientEnsemble,
    spectrum: &SpectrumSpec,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    ensemble.check_pair(i, j)?;
    Ok(weighted_sum(&spectrum.values(ensemble.d), ensemble.row(i), ensemble.row(j)))
}

fn weighted_sum(h: &[f64], xi: &[Complex64], xj: &[Complex64]) -> Complex64 {
    let mut acc = CompensatedComplexSum::new();
    for ((&hn, a), b) in h.iter().zip(xi).zip(xj) {
        acc.add(b.conj() * a * hn);
    }
    acc.value() / xi.len() as f64
}

/// `(1/d) Σ_n X*_jn X_in`.
pub fn gram_limit_check(ensemble: &CoefficientEnsemble, i: usize, j: usize) -> Result<Complex64> {
    ensemble.check_pair(i, j)?;
    Ok(weighted_sum(&alloc::vec![1.0; ensemble.d], ensemble.row(i), ensemble.row(j)))
}

/// Root-mean-square deviation of the weighted quadratic from its mean
/// (`σ_i² Σh/d` on the diagonal, 0 off it) at each dimension, fitted
/// against `d`. Trial `t` at dimension `d` uses seed
/// `derive_seed(derive_seed(seed, d), t)`.
pub fn convergence_scan(
    spectrum: &SpectrumSpec,
    sigmas: &[f64],
    dims: &[usize],
    trials: usize,
    pair: (usize, usize),
    seed: u64,
) -> Result<ScalingFit> {
    let points = scan_points(
        dims,
        trials,
        seed,
        |ens| {
            let h = spectrum.values(ens.d);
            let value = weighted_sum(&h, ens.row(pair.0), ens.row(pair.1));
            let mean = if pair.0 == pair.1 {
                let s = ens.sigmas[pair.0];
                s * s * h.iter().copied().collect::<CompensatedSum>().value() / ens.d as f64
            } else {
                0.0
            };
            (value - mean).norm()
        },
        sigmas,
        pair,
    )?;
    loglog_slope(&points)
}

/// As [`convergence_scan`] for the unweighted Gram element against
/// `σ_i² δ_ij`.
pub fn gram_scan(sigmas: &[f64], dims: &[usize], trials: usize, pair: (usize, usize), seed: u64) -> Result<ScalingFit> {
    let points = scan_points(
        dims,
        trials,
        seed,
        |ens| {
            let value = weighted_sum(&alloc::vec![1.0; ens.d], ens.row(pair.0), ens.row(pair.1));
            let target = if pair.0 == pair.1 { ens.sigmas[pair.0] * ens.sigmas[pair.0] } else { 0.0 };
            (value - target).norm()
        },
        sigmas,
        pair,
    )?;
    loglog_slope(&points)
}

fn scan_points(
    dims: &[usize],
    trials: usize,
    seed: u64,
    deviation: impl Fn(&CoefficientEnsemble) -> f64,
    sigmas: &[f64],
    pair: (usize, usize),
) -> Result<Vec<(f64, f64)>> {
    if trials < 30 {
        return Err(invalid_input!("{trials} trials; at least 30 needed"));
    }
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid_input!("dimensions must increase"));
    }
    if pair.0 >= sigmas.len() || pair.1 >= sigmas.len() {
        return Err(invalid_input!("pair {pair:?} outside {} rows", sigmas.len()));
    }
    dims.iter()
        .map(|&d| {
            let dim_seed = derive_seed(seed, d as u64);
            let mut sq = CompensatedSum::new();
            for t in 0..trials {
                let ens = CoefficientEnsemble::new(d, sigmas, derive_seed(dim_seed, t as u64))?;
                let dev = deviation(&ens);
                sq.add(dev * dev);
            }
            Ok((d as f64, libm::sqrt(sq.value() / trials as f64)))
        })
        .collect()
}

/// Each row multiplied by `U` (`X_i ↦ U X_i`) with per-row component
/// statistics of the result.
#[derive(Debug, Clone)]
pub struct RotationStats {
    pub rotated: CoefficientEnsemble,
    /// Empirical mean of the components of each row.
    pub means: Vec<Complex64>,
    /// Empirical `⟨|x|²⟩` of each row.
    pub variances: Vec<f64>,
    /// Empirical `⟨x²⟩` of each row; near zero for circular entries.
    pub pseudo_variances: Vec<Complex64>,
    /// Empirical `⟨x_i x*_j⟩` between rows.
    pub cross: CMatrix,
}

pub fn basis_rotation_invariance(ensemble: &CoefficientEnsemble, unitary: &CMatrix) -> Result<RotationStats> {
    let d = ensemble.d;
    if unitary.nrows() != d || unitary.ncols() != d {
        return Err(invalid_input!("rotation is {}×{}, ensemble has d = {d}", unitary.nrows(), unitary.ncols()));
    }
    if unitarity_defect(unitary) > 1e-10 {
        return Err(invalid_input!("rotation is not unitary"));
    }
    let rows: Vec<Vec<Complex64>> =
        ensemble.rows.iter().map(|r| (unitary * CVector::from_column_slice(r)).as_slice().to_vec()).collect();
    let n = d as f64;
    let means = rows.iter().map(|r| r.iter().sum::<Complex64>() / n).collect();
    let variances = rows.iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>() / n).collect();
    let pseudo_variances = rows.iter().map(|r| r.iter().map(|z| z * z).sum::<Complex64>() / n).collect();
    let cross = CMatrix::from_fn(rows.len(), rows.len(), |i, j| {
        rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n
    });
    let rotated = CoefficientEnsemble { d, sigmas: ensemble.sigmas.clone(), rows, seed: ensemble.seed };
    Ok(RotationStats { rotated, means, variances, pseudo_variances, cross })
}
