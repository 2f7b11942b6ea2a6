//! Dense complex linear algebra shared by every module.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid_input, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Kronecker product `a ⊗ b`, with `a`'s index the slow one.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest elementwise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(m: &CMatrix) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` are sorted descending and `vectors.column(k)` belongs to
/// `values[k]`. Each column is phased so that its largest-modulus component
/// (first one on ties) is real and positive. Columns spanning a degenerate
/// eigenspace are rebuilt by Gram–Schmidt over the projected standard basis
/// vectors in index order, so the decomposition is reproducible.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `Σ_k λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.vectors;
        let lam =
            CMatrix::from_diagonal(&CVector::from_iterator(self.values.len(), self.values.iter().map(|&x| c(x, 0.0))));
        v * lam * v.adjoint()
    }
}

const HERMITIAN_TOL: f64 = 1e-8;
const DEGENERACY_TOL: f64 = 1e-10;

pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(invalid_input!("hermitian_eig needs a non-empty square matrix"));
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermiticity_defect(m);
    if !(defect <= HERMITIAN_TOL * scale) {
        return Err(invalid_input!("matrix is not Hermitian (defect {defect:e})"));
    }
    let d = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    let tol = DEGENERACY_TOL * scale;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && values[end - 1] - values[end] <= tol {
            end += 1;
        }
        if end - start > 1 {
            canonicalise_subspace(&mut vectors, start, end);
        }
        start = end;
    }
    for k in 0..d {
        fix_phase(&mut vectors, k);
    }
    Ok(HermitianEig { values, vectors })
}

fn canonicalise_subspace(vectors: &mut CMatrix, start: usize, end: usize) {
    let d = vectors.nrows();
    let block = vectors.columns(start, end - start).into_owned();
    let projector = &block * block.adjoint();
    let mut basis: Vec<CVector> = Vec::with_capacity(end - start);
    for a in 0..d {
        if basis.len() == end - start {
            break;
        }
        let mut v: CVector = projector.column(a).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            basis.push(v.unscale(n));
        }
    }
    // Numerically unreachable for a genuine projector; keep the solver's columns.
    if basis.len() != end - start {
        return;
    }
    for (offset, b) in basis.iter().enumerate() {
        vectors.set_column(start + offset, b);
    }
}

fn fix_phase(vectors: &mut CMatrix, k: usize) {
    let col = vectors.column(k);
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = col.iter().position(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap_or(0);
    let z = col[pivot];
    if z.norm() == 0.0 {
        return;
    }
    let phase = z.conj() / z.norm();
    let mut col = vectors.column_mut(k);
    for x in col.iter_mut() {
        *x *= phase;
    }
    col[pivot] = c(col[pivot].norm(), 0.0);
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_from_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(h)?;
    let phases = CVector::from_iterator(eig.dim(), eig.values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)));
    Ok(&eig.vectors * CMatrix::from_diagonal(&phases) * eig.vectors.adjoint())
}

/// Deviation of `u† u` from the identity, elementwise maximum.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}
