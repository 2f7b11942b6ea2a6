//! Exact small-dimension machinery for static bipartite Hamiltonians
//! `H = H_S⊗I + I⊗H_E + Σ_η H^{IS}_η ⊗ H^{IE}_η`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{invalid_input, Error, Result};
use crate::linalg::{
    commutator, hermitian_eig, hermiticity_defect, hs_norm, identity, kron, trace, CMatrix, CVector, HermitianEig,
};
use crate::rdm::{partial_trace_env, BasisSpec};
use crate::rng::{complex_gaussian, derive_seed, real_gaussian, seeded_rng};
use crate::state::{make_product_state, StateVector};

/// Largest `d_S · d_E` accepted by [`exact_evolve`].
pub const MAX_DENSE_DIM: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct StaticTotalHamiltonian {
    h_s: CMatrix,
    h_e: CMatrix,
    terms: Vec<(CMatrix, CMatrix)>,
    hbar: f64,
}

fn check_hermitian(name: &str, m: &CMatrix, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(invalid_input!("{name} is {}×{}, expected {d}×{d}", m.nrows(), m.ncols()));
    }
    let scale = crate::linalg::max_abs(m).max(1.0);
    if hermiticity_defect(m) > HERMITIAN_TOL * scale {
        return Err(invalid_input!("{name} is not Hermitian"));
    }
    Ok(())
}

impl StaticTotalHamiltonian {
    pub fn new(h_s: CMatrix, h_e: CMatrix, terms: Vec<(CMatrix, CMatrix)>, hbar: f64) -> Result<Self> {
        let (d_s, d_e) = (h_s.nrows(), h_e.nrows());
        check_hermitian("H_S", &h_s, d_s)?;
        check_hermitian("H_E", &h_e, d_e)?;
        for (eta, (a, b)) in terms.iter().enumerate() {
            check_hermitian(&alloc::format!("H^IS[{eta}]"), a, d_s)?;
            check_hermitian(&alloc::format!("H^IE[{eta}]"), b, d_e)?;
        }
        if !(hbar > 0.0) {
            return Err(invalid_input!("ħ = {hbar} must be positive"));
        }
        Ok(Self { h_s, h_e, terms, hbar })
    }

    pub fn d_s(&self) -> usize {
        self.h_s.nrows()
    }

    pub fn d_e(&self) -> usize {
        self.h_e.nrows()
    }

    pub fn h_s(&self) -> &CMatrix {
        &self.h_s
    }

    pub fn h_e(&self) -> &CMatrix {
        &self.h_e
    }

    pub fn terms(&self) -> &[(CMatrix, CMatrix)] {
        &self.terms
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// The full `(d_S d_E)²` matrix, system index major.
    pub fn total(&self) -> CMatrix {
        let mut h = kron(&self.h_s, &identity(self.d_e())) + kron(&identity(self.d_s()), &self.h_e);
        for (a, b) in &self.terms {
            h += kron(a, b);
        }
        h
    }
}

/// `H_S + Σ h̄_η H^{IS}_η` with traceless environment factors.
#[derive(Debug, Clone)]
pub struct RenormalizedSplit {
    /// `Tr H^{IE}_η / d_E`.
    pub h_bar_eta: Vec<f64>,
    pub h_s_tilde: CMatrix,
    pub terms_tilde: Vec<(CMatrix, CMatrix)>,
}

impl RenormalizedSplit {
    /// The same physical Hamiltonian with the renormalised split.
    pub fn reassemble(&self, original: &StaticTotalHamiltonian) -> Result<StaticTotalHamiltonian> {
        StaticTotalHamiltonian::new(
            self.h_s_tilde.clone(),
            original.h_e.clone(),
            self.terms_tilde.clone(),
            original.hbar,
        )
    }
}

pub fn renormalize(h: &StaticTotalHamiltonian) -> RenormalizedSplit {
    let d_e = h.d_e();
    let mut h_s_tilde = h.h_s.clone();
    let mut h_bar_eta = Vec::with_capacity(h.terms.len());
    let mut terms_tilde = Vec::with_capacity(h.terms.len());
    for (a, b) in &h.terms {
        let mean = trace(b).re / d_e as f64;
        h_s_tilde += a.scale(mean);
        let shifted = b - identity(d_e).scale(mean);
        h_bar_eta.push(mean);
        terms_tilde.push((a.clone(), shifted));
    }
    RenormalizedSplit { h_bar_eta, h_s_tilde, terms_tilde }
}

/// Symmetric real Gaussian matrix: off-diagonal variance `scale²`, diagonal
/// variance `2·scale²`.
pub fn random_goe(d: usize, scale: f64, seed: u64) -> Result<CMatrix> {
    if d < 2 {
        return Err(invalid_input!("GOE dimension {d} < 2"));
    }
    let mut rng = seeded_rng(seed);
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(core::f64::consts::SQRT_2 * scale * real_gaussian(&mut rng), 0.0);
        for j in i + 1..d {
            let x = Complex64::new(scale * real_gaussian(&mut rng), 0.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    Ok(m)
}

/// Eigendecomposition of a total Hamiltonian, reused across evolution times.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    eig: HermitianEig,
    hbar: f64,
    d_s: usize,
    d_e: usize,
}

impl ExactPropagator {
    pub fn new(h: &StaticTotalHamiltonian) -> Result<Self> {
        let dim = h.d_s() * h.d_e();
        if dim > MAX_DENSE_DIM {
            return Err(Error::RefuseTooLarge { dim, limit: MAX_DENSE_DIM });
        }
        Ok(Self { eig: hermitian_eig(&h.total())?, hbar: h.hbar, d_s: h.d_s(), d_e: h.d_e() })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// Mean spacing of the total spectrum.
    pub fn mean_level_spacing(&self) -> f64 {
        let v = &self.eig.values;
        (v[0] - v[v.len() - 1]) / (v.len() - 1) as f64
    }

    /// `exp(−iHt/ħ) ψ0`.
    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        self.evolve_from(&self.project(psi0)?, t)
    }

    /// Coefficients of `psi0` in the eigenbasis.
    pub fn project(&self, psi0: &StateVector) -> Result<CVector> {
        if psi0.d_s() != self.d_s || psi0.d_e() != self.d_e {
            return Err(invalid_input!(
                "state is {}×{}, Hamiltonian is {}×{}",
                psi0.d_s(),
                psi0.d_e(),
                self.d_s,
                self.d_e
            ));
        }
        Ok(self.eig.vectors.adjoint() * CVector::from_column_slice(psi0.amplitudes()))
    }

    pub fn evolve_from(&self, coeffs: &CVector, t: f64) -> Result<StateVector> {
        let phased = CVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(&self.eig.values).map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t / self.hbar)),
        );
        let out = &self.eig.vectors * phased;
        StateVector::from_amplitudes(self.d_s, self.d_e, out.as_slice().to_vec())
    }
}

/// `ψ(t) = exp(−iHt/ħ) ψ0` via a full eigendecomposition.
pub fn exact_evolve(h: &StaticTotalHamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    ExactPropagator::new(h)?.evolve(psi0, t)
}

/// `dρ^S_ij/dt` in `basis` from the environment vectors `|E_i⟩` of the
/// current state, as `i(W⁽¹⁾ + W⁽²⁾)/ħ` with
/// `W⁽¹⁾ = ⟨S_i|[ρ^S, H_S]|S_j⟩` and
/// `W⁽²⁾ = Σ_η Σ_q (H^{IS}_{η,qj} H^{IE}_{η,qi} − H^{IS}_{η,iq} H^{IE}_{η,jq})`,
/// `H^{IE}_{η,ij} = ⟨E_i|H^{IE}_η|E_j⟩`.
pub fn rhs_elements(state: &StateVector, h: &StaticTotalHamiltonian, basis: &BasisSpec) -> Result<CMatrix> {
    let (d_s, d_e) = (h.d_s(), h.d_e());
    if state.d_s() != d_s || state.d_e() != d_e {
        return Err(invalid_input!("state and Hamiltonian dimensions differ"));
    }
    let b = basis.columns(d_s)?;
    let amps = CMatrix::from_row_slice(d_s, d_e, state.amplitudes());
    // row i holds the components of |E_i⟩
    let e = b.adjoint() * amps;
    let rho = &e * e.adjoint();
    let h_s = b.adjoint() * &h.h_s * &b;
    let mut w = commutator(&rho, &h_s);
    let e_conj = e.conjugate();
    let e_t = e.transpose();
    for (his, hie) in &h.terms {
        let s = b.adjoint() * his * &b;
        let env = &e_conj * hie * &e_t;
        for i in 0..d_s {
            for j in 0..d_s {
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..d_s {
                    acc += s[(q, j)] * env[(q, i)] - s[(i, q)] * env[(j, q)];
                }
                w[(i, j)] += acc;
            }
        }
    }
    Ok(w * Complex64::new(0.0, 1.0 / h.hbar))
}

/// Hilbert–Schmidt norm of `[A, ρ]`.
pub fn commutator_norm(a: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    if a.nrows() != rho.dim() || a.ncols() != rho.dim() {
        return Err(invalid_input!("operator is {}×{}, ρ is {}×{}", a.nrows(), a.ncols(), rho.dim(), rho.dim()));
    }
    Ok(hs_norm(&commutator(a, rho.matrix())))
}

/// Default burn-in `20 / (mean level spacing)` of the total spectrum.
pub fn default_burn_in(propagator: &ExactPropagator) -> f64 {
    20.0 / propagator.mean_level_spacing()
}

/// `‖[H_S, ρ^S(t)]‖` (or with `H̃_S`) at each time, all times at or after
/// `burn_in`.
pub fn stationarity_scan(
    h: &StaticTotalHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    use_renormalized: bool,
    burn_in: f64,
) -> Result<Vec<f64>> {
    let prop = ExactPropagator::new(h)?;
    let reference = if use_renormalized { renormalize(h).h_s_tilde } else { h.h_s.clone() };
    scan_with(&prop, psi0, times, &[&reference], burn_in).map(|mut v| v.pop().unwrap_or_default())
}

/// Commutator norms against several system operators from one propagation.
pub fn scan_with(
    prop: &ExactPropagator,
    psi0: &StateVector,
    times: &[f64],
    operators: &[&CMatrix],
    burn_in: f64,
) -> Result<Vec<Vec<f64>>> {
    if let Some(t) = times.iter().find(|&&t| t < burn_in) {
        return Err(invalid_input!("time {t} precedes burn-in {burn_in}"));
    }
    let coeffs = prop.project(psi0)?;
    let mut out = alloc::vec![Vec::with_capacity(times.len()); operators.len()];
    for &t in times {
        let rho = partial_trace_env(&prop.evolve_from(&coeffs, t)?);
        for (k, a) in operators.iter().enumerate() {
            out[k].push(commutator_norm(a, &rho)?);
        }
    }
    Ok(out)
}

/// Random dense instance: Hermitian Gaussian blocks of unit entry variance
/// and a random normalised state.
pub fn random_instance(
    d_s: usize,
    d_e: usize,
    n_terms: usize,
    seed: u64,
) -> Result<(StaticTotalHamiltonian, StateVector)> {
    let mut stream = 0u64;
    let mut next = |d: usize| {
        stream += 1;
        random_hermitian(d, derive_seed(seed, stream))
    };
    let h_s = next(d_s);
    let h_e = next(d_e);
    let terms = (0..n_terms).map(|_| (next(d_s), next(d_e))).collect();
    let h = StaticTotalHamiltonian::new(h_s, h_e, terms, 1.0)?;
    let mut rng = seeded_rng(derive_seed(seed, 0));
    let amps = (0..d_s * d_e).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    Ok((h, StateVector::from_amplitudes(d_s, d_e, amps)?.normalized()?))
}

fn random_hermitian(d: usize, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let a = CMatrix::from_fn(d, d, |_, _| complex_gaussian(&mut rng, 1.0));
    (&a + a.adjoint()).scale(0.5)
}

/// `‖D_fd − D‖ / ‖D‖` between [`rhs_elements`] at `ψ` and the central
/// difference `(ρ^S(δ) − ρ^S(−δ)) / 2δ` of exactly evolved states, with
/// `δ = 10⁻⁵ / max|E|`.
pub fn finite_difference_error(h: &StaticTotalHamiltonian, psi: &StateVector, basis: &BasisSpec) -> Result<f64> {
    let prop = ExactPropagator::new(h)?;
    let scale = prop.eigenvalues().iter().fold(0.0f64, |m, e| m.max(e.abs())).max(1e-300);
    let delta = 1e-5 * h.hbar / scale;
    let b = basis.columns(h.d_s())?;
    let coeffs = prop.project(psi)?;
    let rho_at = |t: f64| -> Result<CMatrix> { Ok(partial_trace_env(&prop.evolve_from(&coeffs, t)?).in_basis(&b)) };
    let fd = (rho_at(delta)? - rho_at(-delta)?) / Complex64::new(2.0 * delta, 0.0);
    let analytic = rhs_elements(psi, h, basis)?;
    Ok(hs_norm(&(fd - &analytic)) / hs_norm(&analytic))
}

/// Qubit coupled to a narrow-band GOE environment through
/// `σ_x ⊗ (c·I + g·G)`, with `H_S = σ_z`.
///
/// The system gap of `H̃_S = σ_z + c σ_x` exceeds the environment bandwidth, so
/// populations in the `H̃_S` basis stay put while coherences dephase: `ρ^S`
/// ends up commuting with `H̃_S` but not with `H_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoeInstanceSpec {
    pub d_e: usize,
    /// Trace part `c` of the environment coupling factor.
    pub coupling_mean: f64,
    /// Strength `g` of the GOE part of the coupling, normalised to unit
    /// spectral radius.
    pub coupling_width: f64,
    /// Half-bandwidth of `H_E`.
    pub env_width: f64,
}

impl GoeInstanceSpec {
    pub fn new(d_e: usize) -> Self {
        Self { d_e, coupling_mean: 0.5, coupling_width: 0.2, env_width: 0.25 }
    }

    /// Hamiltonian and initial state `|0⟩ ⊗ (Haar-random environment)`.
    pub fn build(&self, seed: u64) -> Result<(StaticTotalHamiltonian, StateVector)> {
        let d = self.d_e;
        // GOE of scale s has spectral radius ≈ 2s√d
        let unit = 1.0 / (2.0 * libm::sqrt(d as f64));
        let h_e = random_goe(d, self.env_width * unit, derive_seed(seed, 1))?;
        let g = random_goe(d, self.coupling_width * unit, derive_seed(seed, 2))?;
        let h_ie = identity(d).scale(self.coupling_mean) + g;
        let h = StaticTotalHamiltonian::new(
            crate::linalg::pauli_z(),
            h_e,
            alloc::vec![(crate::linalg::pauli_x(), h_ie)],
            1.0,
        )?;
        let mut rng = seeded_rng(derive_seed(seed, 3));
        let env: Vec<Complex64> = (0..d).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let zero = Complex64::new(0.0, 0.0);
        let psi = make_product_state(&[Complex64::new(1.0, 0.0), zero], &env)?;
        Ok((h, psi))
    }
}
