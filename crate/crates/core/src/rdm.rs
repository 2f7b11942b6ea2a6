//! Partial traces, time averages and basis-diagonal parts of reduced density
//! matrices.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{invalid_input, Error, Result};
use crate::linalg::{hermitian_eig, identity, max_abs_diff, CMatrix};
use crate::numeric::CompensatedComplexSum;
use crate::series::{MetricSeries, WindowSpec};
use crate::state::StateVector;

/// A fixed orthonormal basis of the system Hilbert space.
#[derive(Debug, Clone)]
pub enum BasisSpec {
    /// Standard basis vectors in index order.
    Computational,
    /// Eigenbasis of the given system Hamiltonian, descending eigenvalues.
    SystemEigenbasis(CMatrix),
    /// Eigenbasis of the system factor of the interaction.
    InteractionEigenbasis(CMatrix),
    /// Explicit basis, one vector per column.
    Explicit(CMatrix),
}

const ORTHONORMAL_TOL: f64 = 1e-10;

impl BasisSpec {
    /// Basis vectors as the columns of a `d × d` unitary.
    pub fn columns(&self, d: usize) -> Result<CMatrix> {
        let cols = match self {
            BasisSpec::Computational => identity(d),
            BasisSpec::SystemEigenbasis(h) | BasisSpec::InteractionEigenbasis(h) => hermitian_eig(h)?.vectors,
            BasisSpec::Explicit(cols) => {
                if !cols.is_square() {
                    return Err(invalid_input!("explicit basis must be square"));
                }
                let defect = max_abs_diff(&(cols.adjoint() * cols), &identity(cols.ncols()));
                if defect > ORTHONORMAL_TOL {
                    return Err(invalid_input!("explicit basis not orthonormal (defect {defect:e})"));
                }
                cols.clone()
            }
        };
        if cols.nrows() != d {
            return Err(invalid_input!("basis dimension {} does not match {d}", cols.nrows()));
        }
        Ok(cols)
    }
}

/// `ρ^S_ij = Σ_n ψ_in ψ_jn^*`.
pub fn partial_trace_env(state: &StateVector) -> DensityMatrix {
    let d = state.d_s();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let ri = state.row(i);
        for j in i..d {
            let rj = state.row(j);
            let v: Complex64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        m[(i, i)].im = 0.0;
    }
    DensityMatrix::from_matrix_unchecked(m)
}

/// One qubit of the two-qubit system `s ⊗ A` (system index `2·s + a`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    S,
    A,
}

/// RDM of one qubit of a `d_s = 4` system, tracing the other qubit and the
/// environment directly from the amplitudes.
pub fn partial_trace_keep(state: &StateVector, keep: Qubit) -> Result<DensityMatrix> {
    if state.d_s() != 4 {
        return Err(invalid_input!("qubit selection needs d_s = 4, got {}", state.d_s()));
    }
    let index = |kept: usize, traced: usize| match keep {
        Qubit::S => 2 * kept + traced,
        Qubit::A => 2 * traced + kept,
    };
    let mut m = CMatrix::zeros(2, 2);
    for x in 0..2 {
        for y in 0..2 {
            let mut v = Complex64::new(0.0, 0.0);
            for t in 0..2 {
                let rx = state.row(index(x, t));
                let ry = state.row(index(y, t));
                v += rx.iter().zip(ry).map(|(a, b)| a * b.conj()).sum::<Complex64>();
            }
            m[(x, y)] = v;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Elementwise mean of the snapshots inside `window`.
pub fn time_average(series: &MetricSeries, window: &WindowSpec) -> Result<DensityMatrix> {
    if !series.has_snapshots() {
        return Err(invalid_input!("series holds no RDM snapshots"));
    }
    let positions = series.window_positions(window)?;
    average_snapshots(positions.iter().map(|&p| &series.snapshots()[p]))
}

pub(crate) fn average_snapshots<'a>(snaps: impl Iterator<Item = &'a DensityMatrix>) -> Result<DensityMatrix> {
    let mut acc: Vec<CompensatedComplexSum> = Vec::new();
    let mut d = 0;
    let mut count = 0usize;
    for r in snaps {
        if count == 0 {
            d = r.dim();
            acc = alloc::vec![CompensatedComplexSum::new(); d * d];
        } else if r.dim() != d {
            return Err(invalid_input!("snapshot dimensions differ"));
        }
        for (a, z) in acc.iter_mut().zip(r.matrix().iter()) {
            a.add(*z);
        }
        count += 1;
    }
    if count == 0 {
        return Err(invalid_input!("empty averaging window"));
    }
    let n = count as f64;
    let m = CMatrix::from_iterator(d, d, acc.iter().map(|a| a.value() / n));
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `Σ_k ⟨b_k|ρ|b_k⟩ |b_k⟩⟨b_k|`, in computational coordinates.
pub fn diagonal_part(rho: &DensityMatrix, basis: &BasisSpec) -> Result<DensityMatrix> {
    let b = basis.columns(rho.dim())?;
    Ok(diagonal_part_in(rho, &b))
}

pub(crate) fn diagonal_part_in(rho: &DensityMatrix, b: &CMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        let v = b.column(k);
        let p = v.dotc(&(rho.matrix() * v)).re;
        out += (v * v.adjoint()).scale(p);
    }
    DensityMatrix::from_matrix_unchecked(out)
}

/// `σ_i = √⟨S_i|ρ̄|S_i⟩`.
pub fn measured_sigmas(rho_bar: &DensityMatrix, basis: &BasisSpec) -> Result<Vec<f64>> {
    let tr = rho_bar.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(invalid_input!("measured_sigmas needs unit trace, got {tr}"));
    }
    let b = basis.columns(rho_bar.dim())?;
    let in_basis = rho_bar.in_basis(&b);
    (0..rho_bar.dim())
        .map(|i| {
            let p = in_basis[(i, i)].re;
            if p < -1e-10 {
                Err(Error::NumericalError(alloc::format!("negative population {p:e} at index {i}")))
            } else {
                Ok(libm::sqrt(p.max(0.0)))
            }
        })
        .collect()
}
