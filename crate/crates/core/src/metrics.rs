//! Scalar diagnostics of reduced density matrices: trace distances,
//! fluctuation measures, basis distances and power-law fits.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{invalid_input, Result};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::numeric::{mean_and_std, CompensatedSum};
use crate::rdm::{average_snapshots, diagonal_part_in, BasisSpec};
use crate::series::{MetricSeries, WindowSpec};

/// RDM eigenvalue gap below which the eigenvectors are treated as undefined.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// `½ Σ_k |μ_k|` over the eigenvalues of `a − b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(invalid_input!("trace distance of {}×{} and {}×{}", a.dim(), a.dim(), b.dim(), b.dim()));
    }
    Ok(trace_norm_half(&(a.matrix() - b.matrix())))
}

pub(crate) fn trace_norm_half(diff: &CMatrix) -> f64 {
    if diff.nrows() == 2 {
        // traceless-part closed form: eigenvalues t/2 ± √(((a-d)/2)² + |b|²)
        let a = diff[(0, 0)].re;
        let d = diff[(1, 1)].re;
        let off = (diff[(0, 1)] + diff[(1, 0)].conj()) * 0.5;
        let half_tr = 0.5 * (a + d);
        let r = libm::sqrt(0.25 * (a - d) * (a - d) + off.norm_sqr());
        return 0.5 * ((half_tr + r).abs() + (half_tr - r).abs());
    }
    let h = (diff + diff.adjoint()).scale(0.5);
    0.5 * SymmetricEigen::new(h).eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// Long-time average `f̄` of `f(t) = T(ρ(t), ρ̄)` and its population standard
/// deviation `Δf`, with `ρ̄` the average over the same window.
pub fn fbar_and_fluct(series: &MetricSeries, window: &WindowSpec) -> Result<(f64, f64)> {
    let f = f_channel(series, window)?;
    Ok(mean_and_std(&f).expect("window is non-empty"))
}

/// `f(t)` for every kick inside `window`.
pub fn f_channel(series: &MetricSeries, window: &WindowSpec) -> Result<Vec<f64>> {
    if !series.has_snapshots() {
        return Err(invalid_input!("series holds no RDM snapshots"));
    }
    let positions = series.window_positions(window)?;
    let snaps = series.snapshots();
    let rho_bar = average_snapshots(positions.iter().map(|&p| &snaps[p]))?;
    Ok(positions.iter().map(|&p| trace_norm_half(&(snaps[p].matrix() - rho_bar.matrix()))).collect())
}

/// `√(mean |ρ_ij(t) − mean ρ_ij|²)` over the window, elements taken in `basis`.
pub fn offdiag_deviation(
    series: &MetricSeries,
    i: usize,
    j: usize,
    window: &WindowSpec,
    basis: &BasisSpec,
) -> Result<f64> {
    if i == j {
        return Err(invalid_input!("offdiag_deviation needs i != j"));
    }
    let values = element_channel(series, i, j, window, basis)?;
    Ok(complex_deviation_of(&values))
}

/// `ρ_ij(t)` in `basis` for every kick inside `window`.
pub fn element_channel(
    series: &MetricSeries,
    i: usize,
    j: usize,
    window: &WindowSpec,
    basis: &BasisSpec,
) -> Result<Vec<Complex64>> {
    if !series.has_snapshots() {
        return Err(invalid_input!("series holds no RDM snapshots"));
    }
    let d = series.snapshots()[0].dim();
    if i >= d || j >= d {
        return Err(invalid_input!("element ({i}, {j}) outside a {d}×{d} RDM"));
    }
    let b = basis.columns(d)?;
    let (bi, bj) = (b.column(i), b.column(j));
    let positions = series.window_positions(window)?;
    Ok(positions.iter().map(|&p| bi.dotc(&(series.snapshots()[p].matrix() * bj))).collect())
}

/// `√(mean |z − mean z|²)` with compensated sums.
pub fn complex_deviation_of(values: &[Complex64]) -> f64 {
    let n = values.len() as f64;
    let re = values.iter().map(|z| z.re).collect::<CompensatedSum>().value() / n;
    let im = values.iter().map(|z| z.im).collect::<CompensatedSum>().value() / n;
    let mean = Complex64::new(re, im);
    let var = values.iter().map(|z| (z - mean).norm_sqr()).collect::<CompensatedSum>().value() / n;
    libm::sqrt(var)
}

/// Trace distance between `ρ̄` and its diagonal part in `basis`.
pub fn g_energy_diag(rho_bar: &DensityMatrix, basis: &BasisSpec) -> Result<f64> {
    let b = basis.columns(rho_bar.dim())?;
    let diag = diagonal_part_in(rho_bar, &b);
    Ok(trace_norm_half(&(rho_bar.matrix() - diag.matrix())))
}

/// Root-mean-square estimate `σ₁σ₂ / √(d_E N_T)` of the energy-basis
/// off-diagonal of a time-averaged qubit RDM.
pub fn g_rms_qubit(sigma1: f64, sigma2: f64, d_e: usize, n_t: usize) -> f64 {
    sigma1 * sigma2 / libm::sqrt(d_e as f64 * n_t as f64)
}

/// Fluctuation estimate `σ_i σ_j / √d_E` of an off-diagonal RDM element.
pub fn offdiag_prediction(sigma_i: f64, sigma_j: f64, d_e: usize) -> f64 {
    sigma_i * sigma_j / libm::sqrt(d_e as f64)
}

/// `½ √(d_S / (N_T d_E)) · √(Σ_{i≠j} σ_i² σ_j²)`.
pub fn g_bound_model2(sigmas: &[f64], d_s: usize, d_e: usize, n_t: usize) -> Result<f64> {
    let total: f64 = sigmas.iter().map(|s| s * s).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(invalid_input!("Σσ² = {total}, expected 1"));
    }
    let cross: f64 = sigmas
        .iter()
        .enumerate()
        .flat_map(|(i, si)| {
            sigmas.iter().enumerate().filter(move |(j, _)| *j != i).map(move |(_, sj)| si * si * sj * sj)
        })
        .sum();
    Ok(0.5 * libm::sqrt(d_s as f64 / (n_t as f64 * d_e as f64)) * libm::sqrt(cross))
}

/// Basis distance `1 − |⟨ρ_k|η_k'⟩|²` for a qubit RDM, with the pair chosen by
/// `|⟨ρ_k|η_k'⟩|² ≥ ½` (smaller `k'` on an exact tie).
pub fn basis_distance_d(rho_t: &DensityMatrix, basis: &BasisSpec) -> Result<f64> {
    basis_distance_d_flagged(rho_t, basis).map(|(d, _)| d)
}

/// [`basis_distance_d`] plus a flag set when the RDM eigenvalue gap is below
/// [`DEGENERACY_GAP`].
pub fn basis_distance_d_flagged(rho_t: &DensityMatrix, basis: &BasisSpec) -> Result<(f64, bool)> {
    if rho_t.dim() != 2 {
        return Err(invalid_input!("basis_distance_d needs d_S = 2; use entropy_width_D"));
    }
    let eta = basis.columns(2)?;
    distance_with_columns(rho_t, &eta)
}

pub(crate) fn distance_with_columns(rho_t: &DensityMatrix, eta: &CMatrix) -> Result<(f64, bool)> {
    let eig = hermitian_eig(rho_t.matrix())?;
    let degenerate = eig.values[0] - eig.values[1] < DEGENERACY_GAP;
    let v = eig.vectors.column(0);
    let overlaps = [eta.column(0).dotc(&v).norm_sqr(), eta.column(1).dotc(&v).norm_sqr()];
    let k_prime = if overlaps[0] >= 0.5 { 0 } else { 1 };
    let d = (1.0 - overlaps[k_prime]).clamp(0.0, 0.5);
    Ok((d, degenerate))
}

/// Maximum over RDM eigenvectors of the Shannon entropy of their overlap
/// distribution on `basis`; lies in `[0, ln d_S]`.
#[allow(non_snake_case)]
pub fn entropy_width_D(rho_t: &DensityMatrix, basis: &BasisSpec) -> Result<f64> {
    entropy_width_flagged(rho_t, basis).map(|(w, _)| w)
}

pub fn entropy_width_flagged(rho_t: &DensityMatrix, basis: &BasisSpec) -> Result<(f64, bool)> {
    let eta = basis.columns(rho_t.dim())?;
    entropy_with_columns(rho_t, &eta)
}

pub(crate) fn entropy_with_columns(rho_t: &DensityMatrix, eta: &CMatrix) -> Result<(f64, bool)> {
    let eig = hermitian_eig(rho_t.matrix())?;
    let degenerate = eig.values.windows(2).any(|w| w[0] - w[1] < DEGENERACY_GAP);
    Ok((entropy_of_vectors(&eig.vectors, eta), degenerate))
}

/// `max_k −Σ_k' p ln p` with `p = |⟨η_k'|v_k⟩|²`; `0 ln 0 = 0`.
pub fn entropy_of_vectors(vectors: &CMatrix, eta: &CMatrix) -> f64 {
    let overlaps = eta.adjoint() * vectors;
    (0..vectors.ncols())
        .map(|k| {
            overlaps.column(k).iter().map(|z| z.norm_sqr()).filter(|&p| p > 0.0).map(|p| -p * libm::log(p)).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Arithmetic mean of a scalar channel over the window.
pub fn time_averaged_metric(series: &MetricSeries, channel: &str, window: &WindowSpec) -> Result<f64> {
    let values = series.channel(channel).ok_or_else(|| invalid_input!("channel {channel} not recorded"))?;
    let positions = series.window_positions(window)?;
    let sum = positions.iter().map(|&p| values[p]).collect::<CompensatedSum>().value();
    Ok(sum / positions.len() as f64)
}

/// Trace distance between `ρ̄` and `I / d_S`.
pub fn depolarization_distance(rho_bar: &DensityMatrix) -> Result<f64> {
    trace_distance(rho_bar, &DensityMatrix::maximally_mixed(rho_bar.dim()))
}

/// Least-squares line through `(log₂ d_E, log₂ value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the fit residuals in log₂ units.
    pub residual: f64,
}

/// Fits `log₂ value = slope · log₂ d_E + intercept`; needs at least three
/// points with positive values.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(invalid_input!("a scaling fit needs at least 3 points, got {}", points.len()));
    }
    if let Some(&(x, v)) = points.iter().find(|&&(x, v)| !(x > 0.0) || !(v > 0.0)) {
        return Err(invalid_input!("non-positive point ({x}, {v}) in log-log fit"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, v)| (libm::log2(x), libm::log2(v))).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid_input!("all abscissae coincide"));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = libm::sqrt(
        logs.iter()
            .map(|p| {
                let r = p.1 - slope * p.0 - intercept;
                r * r
            })
            .sum::<f64>()
            / n,
    );
    Ok(ScalingFit { points: logs, slope, intercept, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, pauli_x, pauli_z, CVector};
    use crate::rng::{complex_gaussian, seeded_rng};
    use alloc::vec;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn rotated_basis(phi: f64) -> CMatrix {
        let (s, co) = libm::sincos(phi);
        CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
    }

    #[test]
    fn trace_distance_cases() {
        let r = DensityMatrix::from_diagonal(&[0.3, 0.7]);
        assert_eq!(trace_distance(&r, &r).unwrap(), 0.0);
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]);
        let b = DensityMatrix::from_diagonal(&[0.0, 1.0]);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let q = DensityMatrix::from_diagonal(&[0.75, 0.25]);
        assert!((trace_distance(&q, &DensityMatrix::maximally_mixed(2)).unwrap() - 0.25).abs() < 1e-15);
        assert!(trace_distance(&q, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn qubit_closed_form_agrees_with_eigen_route() {
        let mut rng = seeded_rng(2);
        for _ in 0..200 {
            let v: Vec<_> = (0..2).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let w: Vec<_> = (0..2).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let diff = DensityMatrix::pure(&v).unwrap().into_matrix() - DensityMatrix::pure(&w).unwrap().into_matrix();
            let h = (&diff + diff.adjoint()).scale(0.5);
            let eig_route = 0.5 * SymmetricEigen::new(h).eigenvalues.iter().map(|x| x.abs()).sum::<f64>();
            assert!((trace_norm_half(&diff) - eig_route).abs() < 1e-13);
        }
    }

    #[test]
    fn fbar_constant_and_alternating() {
        let w = WindowSpec::new(1, 4).unwrap();
        let constant =
            MetricSeries::from_snapshots(vec![1, 2, 3, 4], vec![DensityMatrix::from_diagonal(&[0.6, 0.4]); 4]).unwrap();
        assert_eq!(fbar_and_fluct(&constant, &w).unwrap(), (0.0, 0.0));
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]);
        let b = DensityMatrix::from_diagonal(&[0.0, 1.0]);
        let alt = MetricSeries::from_snapshots(vec![1, 2, 3, 4], vec![a.clone(), b.clone(), a, b]).unwrap();
        let (fbar, df) = fbar_and_fluct(&alt, &w).unwrap();
        assert!((fbar - 0.5).abs() < 1e-15 && df.abs() < 1e-15);
        assert!(fbar_and_fluct(&MetricSeries::new(), &w).is_err());
    }

    #[test]
    fn offdiag_deviation_constant_is_zero() {
        let r = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let s = MetricSeries::from_snapshots((1..=5).collect(), vec![r; 5]).unwrap();
        let w = WindowSpec::new(1, 5).unwrap();
        assert_eq!(offdiag_deviation(&s, 0, 1, &w, &BasisSpec::Computational).unwrap(), 0.0);
        assert!(offdiag_deviation(&s, 1, 1, &w, &BasisSpec::Computational).is_err());
        let bare = MetricSeries::from_channel(vec![1], "x", vec![0.0]).unwrap();
        assert!(offdiag_deviation(&bare, 0, 1, &WindowSpec::new(1, 1).unwrap(), &BasisSpec::Computational).is_err());
    }

    #[test]
    fn offdiag_deviation_calibrates_on_gaussian_elements() {
        // ρ₁₂(t) independent circular Gaussians of variance v: the estimator
        // should return √v.
        let v = 4e-4;
        let mut rng = seeded_rng(17);
        let n = 10_000u64;
        let snaps: Vec<DensityMatrix> = (0..n)
            .map(|_| {
                let z = complex_gaussian(&mut rng, v);
                DensityMatrix::from_matrix_unchecked(CMatrix::from_row_slice(
                    2,
                    2,
                    &[c(0.5, 0.0), z, z.conj(), c(0.5, 0.0)],
                ))
            })
            .collect();
        let s = MetricSeries::from_snapshots((1..=n).collect(), snaps).unwrap();
        let dev = offdiag_deviation(&s, 0, 1, &WindowSpec::new(1, n).unwrap(), &BasisSpec::Computational).unwrap();
        assert!((dev / libm::sqrt(v) - 1.0).abs() < 0.05, "{dev}");
    }

    #[test]
    fn g_cases() {
        let basis = BasisSpec::Computational;
        assert_eq!(g_energy_diag(&DensityMatrix::from_diagonal(&[0.6, 0.4]), &basis).unwrap(), 0.0);
        let r = DensityMatrix::from_matrix_unchecked(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.4, 0.0)],
        ));
        assert!((g_energy_diag(&r, &basis).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn g_equals_offdiag_modulus_for_qubits() {
        let mut rng = seeded_rng(23);
        let h = pauli_x().scale(0.8) + pauli_z().scale(0.3);
        let basis = BasisSpec::SystemEigenbasis(h.clone());
        let e = hermitian_eig(&h).unwrap().vectors;
        for _ in 0..100 {
            let v: Vec<_> = (0..2).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let w: Vec<_> = (0..2).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let r = DensityMatrix::from_matrix_unchecked(
                DensityMatrix::pure(&v).unwrap().into_matrix().scale(0.3)
                    + DensityMatrix::pure(&w).unwrap().into_matrix().scale(0.7),
            );
            let off = r.in_basis(&e)[(0, 1)].norm();
            assert!((g_energy_diag(&r, &basis).unwrap() - off).abs() < 1e-12);
        }
    }

    #[test]
    fn g_vanishes_iff_commuting_with_projectors() {
        let h = pauli_x() + pauli_z().scale(0.5);
        let basis = BasisSpec::SystemEigenbasis(h.clone());
        let e = hermitian_eig(&h).unwrap().vectors;
        // diagonal in the eigenbasis → commutes with every projector
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.8, 0.0), c(0.2, 0.0)]));
        let r = DensityMatrix::from_matrix_unchecked(&e * diag * e.adjoint());
        assert!(g_energy_diag(&r, &basis).unwrap() < 1e-10);
        for k in 0..2 {
            let p = e.column(k) * e.column(k).adjoint();
            assert!(crate::linalg::hs_norm(&crate::linalg::commutator(&p, r.matrix())) < 1e-10);
        }
        // a coherence in the eigenbasis breaks both
        let r2 = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(g_energy_diag(&r2, &basis).unwrap() > 1e-3);
        let p = e.column(0) * e.column(0).adjoint();
        assert!(crate::linalg::hs_norm(&crate::linalg::commutator(&p, r2.matrix())) > 1e-3);
    }

    #[test]
    fn g_bound_cases() {
        assert_eq!(g_bound_model2(&[1.0, 0.0, 0.0, 0.0], 4, 4096, 10_000).unwrap(), 0.0);
        // ½ · √(4 / (10⁴ · 4096)) · √(12/16)
        let b = g_bound_model2(&[0.5; 4], 4, 4096, 10_000).unwrap();
        let expected = 0.5 * libm::sqrt(4.0 / (1e4 * 4096.0)) * libm::sqrt(0.75);
        assert!((b - expected).abs() < 1e-18);
        assert!((b - 1.353e-4).abs() < 1e-7);
        let b2 = g_bound_model2(&[0.5; 4], 4, 4096, 20_000).unwrap();
        assert!((b / b2 - libm::sqrt(2.0)).abs() < 1e-12);
        assert!(g_bound_model2(&[0.5, 0.5], 2, 16, 10).is_err());
    }

    #[test]
    fn basis_distance_cases() {
        let r = DensityMatrix::from_diagonal(&[0.8, 0.2]);
        assert_eq!(basis_distance_d(&r, &BasisSpec::Computational).unwrap(), 0.0);
        let rot45 = BasisSpec::Explicit(rotated_basis(PI / 4.0));
        assert!((basis_distance_d(&r, &rot45).unwrap() - 0.5).abs() < 1e-12);
        for &phi in &[0.1, 0.3, 0.5, 0.7] {
            let d = basis_distance_d(&r, &BasisSpec::Explicit(rotated_basis(phi))).unwrap();
            let s = libm::sin(phi);
            assert!((d - s * s).abs() < 1e-12, "phi={phi}");
        }
        assert!(basis_distance_d(&DensityMatrix::maximally_mixed(4), &BasisSpec::Computational).is_err());
        let (_, flagged) =
            basis_distance_d_flagged(&DensityMatrix::maximally_mixed(2), &BasisSpec::Computational).unwrap();
        assert!(flagged);
    }

    #[test]
    fn basis_distance_ignores_phases_and_relabeling() {
        let mut rng = seeded_rng(31);
        for _ in 0..50 {
            let v: Vec<_> = (0..2).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let r = DensityMatrix::from_matrix_unchecked(
                DensityMatrix::pure(&v).unwrap().into_matrix().scale(0.7) + CMatrix::identity(2, 2).scale(0.15),
            );
            let eta = rotated_basis(0.37);
            let base = basis_distance_d(&r, &BasisSpec::Explicit(eta.clone())).unwrap();
            let mut phased = eta.clone();
            for x in phased.column_mut(0).iter_mut() {
                *x *= Complex64::from_polar(1.0, 1.1);
            }
            for x in phased.column_mut(1).iter_mut() {
                *x *= Complex64::from_polar(1.0, -0.4);
            }
            let mut swapped = eta.clone();
            swapped.swap_columns(0, 1);
            assert!((basis_distance_d(&r, &BasisSpec::Explicit(phased)).unwrap() - base).abs() < 1e-12);
            assert!((basis_distance_d(&r, &BasisSpec::Explicit(swapped)).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_width_cases() {
        let r = DensityMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1]);
        assert_eq!(entropy_width_D(&r, &BasisSpec::Computational).unwrap(), 0.0);
        // Fourier basis has uniform overlaps with the standard basis
        let d = 4;
        let fourier = CMatrix::from_fn(d, d, |a, b| Complex64::from_polar(0.5, 2.0 * PI * (a * b) as f64 / d as f64));
        let w = entropy_width_D(&r, &BasisSpec::Explicit(fourier)).unwrap();
        assert!((w - libm::log(4.0)).abs() < 1e-12);
        // overlaps (3/4, 1/4): rotation by π/6
        let q = DensityMatrix::from_diagonal(&[0.9, 0.1]);
        let w = entropy_width_D(&q, &BasisSpec::Explicit(rotated_basis(PI / 6.0))).unwrap();
        let expected = -0.75 * libm::log(0.75) - 0.25 * libm::log(0.25);
        assert!((w - expected).abs() < 1e-12);
        assert!((expected - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn entropy_width_ignores_permutation_and_phase() {
        let r = DensityMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1]);
        let h = CMatrix::from_fn(4, 4, |a, b| c(((a + 2 * b) % 5) as f64, 0.0));
        let h = (&h + h.transpose()).scale(0.5);
        let eta = hermitian_eig(&h).unwrap().vectors;
        let base = entropy_width_D(&r, &BasisSpec::Explicit(eta.clone())).unwrap();
        let mut perm = eta.clone();
        perm.swap_columns(0, 3);
        perm.swap_columns(1, 2);
        for x in perm.column_mut(2).iter_mut() {
            *x *= Complex64::from_polar(1.0, 0.9);
        }
        let w = entropy_width_D(&r, &BasisSpec::Explicit(perm)).unwrap();
        assert!((w - base).abs() < 1e-12);
        assert!(w <= libm::log(4.0) + 1e-12);
    }

    #[test]
    fn time_averaged_metric_cases() {
        let s = MetricSeries::from_channel((1..=11).collect(), "d", vec![0.25; 11]).unwrap();
        let w = WindowSpec::new(1, 11).unwrap();
        assert!((time_averaged_metric(&s, "d", &w).unwrap() - 0.25).abs() < 1e-16);
        let ramp =
            MetricSeries::from_channel((1..=11).collect(), "d", (0..=10).map(|k| k as f64 / 10.0).collect()).unwrap();
        assert!((time_averaged_metric(&ramp, "d", &w).unwrap() - 0.5).abs() < 1e-15);
        assert!(time_averaged_metric(&ramp, "missing", &w).is_err());
    }

    #[test]
    fn depolarization_cases() {
        assert!(depolarization_distance(&DensityMatrix::maximally_mixed(2)).unwrap().abs() < 1e-16);
        let pure = DensityMatrix::pure(&[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        assert!((depolarization_distance(&pure).unwrap() - 0.5).abs() < 1e-15);
        let r = DensityMatrix::from_diagonal(&[0.9, 0.1]);
        assert!((depolarization_distance(&r).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn loglog_exact_and_constant() {
        let pts: Vec<(f64, f64)> = (6..=12)
            .map(|k| {
                let d = (1u64 << k) as f64;
                (d, 3.0 / libm::sqrt(d))
            })
            .collect();
        let fit = loglog_slope(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat: Vec<(f64, f64)> = (6..=9).map(|k| ((1u64 << k) as f64, 0.2)).collect();
        assert!(loglog_slope(&flat).unwrap().slope.abs() < 1e-15);
        assert!(loglog_slope(&pts[..2]).is_err());
        assert!(loglog_slope(&[(2.0, 1.0), (4.0, 0.0), (8.0, 1.0)]).is_err());
    }

    #[test]
    fn loglog_noisy_power_law() {
        let mut rng = seeded_rng(5);
        let pts: Vec<(f64, f64)> = (6..=16)
            .map(|k| {
                let d = (1u64 << k) as f64;
                let noise = 0.05 * crate::rng::real_gaussian(&mut rng);
                (d, 2.0 / libm::sqrt(d) * (1.0 + noise))
            })
            .collect();
        let fit = loglog_slope(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.05, "{}", fit.slope);
    }

    #[test]
    fn trace_distance_is_a_metric() {
        let mut rng = seeded_rng(77);
        let mut random_rho = |d: usize| {
            let a = CMatrix::from_fn(d, d, |_, _| complex_gaussian(&mut rng, 1.0));
            let m = &a * a.adjoint();
            let t = crate::linalg::trace(&m);
            DensityMatrix::from_matrix_unchecked(m / t)
        };
        for trial in 0..1000 {
            let d = if trial % 2 == 0 { 2 } else { 4 };
            let (a, b, cc) = (random_rho(d), random_rho(d), random_rho(d));
            let ab = trace_distance(&a, &b).unwrap();
            assert_eq!(ab, trace_distance(&b, &a).unwrap());
            let ac = trace_distance(&a, &cc).unwrap();
            let cb = trace_distance(&cc, &b).unwrap();
            assert!(ab <= ac + cb + 1e-10);
            assert!((0.0..=1.0 + 1e-12).contains(&ab));
        }
    }
}
