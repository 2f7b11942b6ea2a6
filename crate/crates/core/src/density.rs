//! Density matrices.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{invalid_input, Result};
use crate::linalg::{c, hermiticity_defect, max_abs, trace, CMatrix, CVector};

/// Hermitian `d × d` matrix representing a (reduced) density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

const HERMITIAN_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Wraps `m` after checking that it is square and Hermitian within 10⁻¹⁰.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(invalid_input!("density matrix must be square and non-empty"));
        }
        let defect = hermiticity_defect(&m);
        if !(defect <= HERMITIAN_TOL * max_abs(&m).max(1.0)) {
            return Err(invalid_input!("density matrix not Hermitian (defect {defect:e})"));
        }
        Ok(Self(m))
    }

    pub fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        Self(CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0)))))
    }

    /// `|v⟩⟨v|` for a normalised copy of `v`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let mut v = CVector::from_column_slice(v);
        let n = v.norm();
        if !(n > 0.0) {
            return Err(invalid_input!("pure state vector must be nonzero"));
        }
        v.unscale_mut(n);
        Ok(Self(&v * v.adjoint()))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(CMatrix::identity(d, d).unscale(d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.0)
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// Eigenvalues of the Hermitian part, unsorted.
    pub fn eigenvalues(&self) -> CVector {
        let h = (&self.0 + self.0.adjoint()).scale(0.5);
        let vals = SymmetricEigen::new(h).eigenvalues;
        CVector::from_iterator(vals.len(), vals.iter().map(|&x| c(x, 0.0)))
    }

    /// Matrix elements `⟨b_k|ρ|b_l⟩` in the basis whose columns are `basis`.
    pub fn in_basis(&self, basis: &CMatrix) -> CMatrix {
        basis.adjoint() * &self.0 * basis
    }

    /// Unit trace and spectrum bounded below by `-tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let tr = self.trace();
        (tr.re - 1.0).abs() <= tol
            && tr.im.abs() <= tol
            && hermiticity_defect(&self.0) <= tol
            && self.eigenvalues().iter().all(|x| x.re >= -tol)
    }
}
