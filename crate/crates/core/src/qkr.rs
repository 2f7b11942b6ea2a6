//! Torus-quantised kicked rotor coupled to a qubit (model 1) or to a qubit
//! pair (model 2), propagated one kick at a time by split-operator FFTs.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid_input, Error, Result};
use crate::fft::Radix2Fft;
use crate::linalg::{hermitian_eig, identity, kron, pauli_x, pauli_z, unitary_from_hermitian, CMatrix};
use crate::metrics::{distance_with_columns, entropy_with_columns};
use crate::numeric::{mul_mod_two_pi, DoubleDouble};
use crate::rdm::partial_trace_env;
use crate::series::{MetricSeries, WindowSpec};
use crate::state::{haar_random_env, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Qubit,
    TwoQubit,
}

impl Model {
    pub fn d_s(self) -> usize {
        match self {
            Model::Qubit => 2,
            Model::TwoQubit => 4,
        }
    }
}

/// System frequencies in units of `ħ_eff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omegas {
    /// `Ω_x σ_x + Ω_z σ_z`.
    Qubit { x: f64, z: f64 },
    /// `Ω_x^s σ_x^s + Ω_z^s σ_z^s + Ω_x^A σ_x^A + ε σ_z^s σ_z^A`.
    TwoQubit { x_s: f64, z_s: f64, x_a: f64, eps: f64 },
}

impl Omegas {
    pub fn model(&self) -> Model {
        match self {
            Omegas::Qubit { .. } => Model::Qubit,
            Omegas::TwoQubit { .. } => Model::TwoQubit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub d_e: usize,
    /// Kick strength `K = k ħ_eff`.
    pub k_cap: f64,
    pub lambda: f64,
    pub omegas: Omegas,
}

impl ModelParams {
    pub fn qubit(d_e: usize, k_cap: f64, lambda: f64, x: f64, z: f64) -> Self {
        Self { d_e, k_cap, lambda, omegas: Omegas::Qubit { x, z } }
    }

    pub fn two_qubit(d_e: usize, k_cap: f64, lambda: f64, x_s: f64, z_s: f64, x_a: f64, eps: f64) -> Self {
        Self { d_e, k_cap, lambda, omegas: Omegas::TwoQubit { x_s, z_s, x_a, eps } }
    }

    pub fn model(&self) -> Model {
        self.omegas.model()
    }

    pub fn d_s(&self) -> usize {
        self.model().d_s()
    }

    pub fn hbar_eff(&self) -> f64 {
        2.0 * PI / self.d_e as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_e < 2 || !self.d_e.is_power_of_two() {
            return Err(Error::ConfigError(alloc::format!("d_E = {} is not a power of two ≥ 2", self.d_e)));
        }
        if !(self.k_cap >= 0.0) || !self.k_cap.is_finite() {
            return Err(Error::ConfigError(alloc::format!("K = {} must be finite and non-negative", self.k_cap)));
        }
        let finite = match self.omegas {
            Omegas::Qubit { x, z } => x.is_finite() && z.is_finite(),
            Omegas::TwoQubit { x_s, z_s, x_a, eps } => [x_s, z_s, x_a, eps].iter().all(|v| v.is_finite()),
        };
        if !finite || !self.lambda.is_finite() {
            return Err(Error::ConfigError("non-finite coupling or frequency".into()));
        }
        Ok(())
    }

    /// Dimensionless system generator `Λ`, so that one period of free system
    /// motion is `exp(−iΛ)`.
    pub fn system_generator(&self) -> CMatrix {
        let h = self.hbar_eff();
        match self.omegas {
            Omegas::Qubit { x, z } => pauli_x().scale(x * h) + pauli_z().scale(z * h),
            Omegas::TwoQubit { x_s, z_s, x_a, eps } => {
                let id = identity(2);
                kron(&pauli_x(), &id).scale(x_s * h)
                    + kron(&pauli_z(), &id).scale(z_s * h)
                    + kron(&id, &pauli_x()).scale(x_a * h)
                    + kron(&pauli_z(), &pauli_z()).scale(eps * h)
            }
        }
    }

    /// Coupled `σ_z` eigenvalue of system branch `b`: `σ_z` of the qubit in
    /// model 1, `σ_z^A` in model 2 where `b = 2s + a`.
    pub fn branch_sign(&self, b: usize) -> f64 {
        if b & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Precomputed tables realising one Floquet period.
#[derive(Debug, Clone)]
pub struct FloquetModel {
    params: ModelParams,
    kick_phases: Vec<Vec<Complex64>>,
    free_phases: Vec<Complex64>,
    // free phases over d, in the FFT's bit-reversed bin order
    scrambled_free: Vec<Complex64>,
    system_unitary: CMatrix,
    system_generator: CMatrix,
    energy_basis: CMatrix,
    fft: Radix2Fft,
}

/// Builds the phase tables and the system unitary.
pub fn build_model(params: ModelParams) -> Result<FloquetModel> {
    params.validate()?;
    let d = params.d_e;
    let d_s = params.d_s();
    let k = DoubleDouble::div_two_pi(params.k_cap * d as f64);
    let cosines: Vec<f64> = (1..=d).map(|n| libm::cos(2.0 * PI * n as f64 / d as f64)).collect();
    let chaotic: Vec<f64> = cosines.iter().map(|&c| mul_mod_two_pi(k, c)).collect();
    let kick_phases = (0..d_s)
        .map(|b| {
            let lz = params.lambda * params.branch_sign(b);
            chaotic.iter().zip(&cosines).map(|(&a, &c)| Complex64::from_polar(1.0, -(a + lz * c))).collect()
        })
        .collect();

    // bin q holds momentum m = q (q < d/2) or q − d; m² is reduced mod 2d
    // exactly so the phase −π m²/d is taken in [0, 2π)
    let two_d = 2 * d as u64;
    let free_phases = (0..d)
        .map(|q| {
            let m = if q < d / 2 { q as i64 } else { q as i64 - d as i64 };
            let m2 = (m.unsigned_abs() * m.unsigned_abs()) % two_d;
            Complex64::from_polar(1.0, -PI * m2 as f64 / d as f64)
        })
        .collect::<Vec<Complex64>>();
    let fft = Radix2Fft::new(d)?;
    let mut scrambled_free = vec![Complex64::new(0.0, 0.0); d];
    for (q, p) in free_phases.iter().enumerate() {
        scrambled_free[fft.scrambled_index(q)] = p / d as f64;
    }

    let system_generator = params.system_generator();
    let system_unitary = unitary_from_hermitian(&system_generator, 1.0)?;
    let descending = hermitian_eig(&system_generator)?.vectors;
    let energy_basis = CMatrix::from_fn(d_s, d_s, |r, c| descending[(r, d_s - 1 - c)]);
    Ok(FloquetModel {
        fft,
        params,
        kick_phases,
        free_phases,
        scrambled_free,
        system_unitary,
        system_generator,
        energy_basis,
    })
}

impl FloquetModel {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn d_s(&self) -> usize {
        self.params.d_s()
    }

    pub fn d_e(&self) -> usize {
        self.params.d_e
    }

    /// `exp(−i(k + λ z_b) cos θ_n)` for `n = 1..d_E`, stored at `n − 1`.
    pub fn kick_phases(&self, branch: usize) -> &[Complex64] {
        &self.kick_phases[branch]
    }

    /// `exp(−iπm²/d_E)` per FFT bin.
    pub fn free_phases(&self) -> &[Complex64] {
        &self.free_phases
    }

    pub fn system_unitary(&self) -> &CMatrix {
        &self.system_unitary
    }

    pub fn system_generator(&self) -> &CMatrix {
        &self.system_generator
    }

    /// Eigenvectors of the system generator as columns, lowest level first.
    pub fn energy_basis(&self) -> &CMatrix {
        &self.energy_basis
    }

    /// Applies one period in place.
    pub fn step_in_place(&self, state: &mut StateVector) -> Result<()> {
        self.check_dims(state)?;
        let d = self.d_e();
        let d_s = self.d_s();
        for b in 0..d_s {
            let row = state.row_mut(b);
            for (a, p) in row.iter_mut().zip(&self.kick_phases[b]) {
                *a *= p;
            }
            self.fft.forward_scrambled(row);
            for (a, p) in row.iter_mut().zip(&self.scrambled_free) {
                *a *= p;
            }
            self.fft.inverse_scrambled(row);
        }
        let u = &self.system_unitary;
        let amps = state.amplitudes_mut();
        let mut column = [Complex64::new(0.0, 0.0); 4];
        for n in 0..d {
            for (i, slot) in column.iter_mut().take(d_s).enumerate() {
                *slot = amps[i * d + n];
            }
            for i in 0..d_s {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, v) in column.iter().take(d_s).enumerate() {
                    acc += u[(i, j)] * v;
                }
                amps[i * d + n] = acc;
            }
        }
        Ok(())
    }

    fn check_dims(&self, state: &StateVector) -> Result<()> {
        if state.d_s() != self.d_s() || state.d_e() != self.d_e() {
            return Err(invalid_input!(
                "state is {}×{}, model expects {}×{}",
                state.d_s(),
                state.d_e(),
                self.d_s(),
                self.d_e()
            ));
        }
        Ok(())
    }
}

/// Applies one Floquet period to a copy of `state`.
pub fn floquet_step(model: &FloquetModel, state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    model.step_in_place(&mut out)?;
    Ok(out)
}

/// What [`evolve`] stores for kicks inside the window.
#[derive(Debug, Clone, Default)]
pub struct RecorderSpec {
    /// Kicks to record; `None` records nothing.
    pub window: Option<WindowSpec>,
    pub snapshots: bool,
    /// Reference basis for the `d_or_D` channel: the basis distance when
    /// `d_S = 2`, the entropy width otherwise.
    pub metric_basis: Option<CMatrix>,
    /// Records the state norm in the `norm` channel.
    pub norm: bool,
}

impl RecorderSpec {
    pub fn snapshots(window: WindowSpec) -> Self {
        Self { window: Some(window), snapshots: true, ..Self::default() }
    }
}

/// Kicks between norm checks outside the recording window.
const NAN_CHECK_INTERVAL: u64 = 1000;

/// Runs `n_kicks` periods, recording after each full step inside the window.
/// Returns the series and the final state.
pub fn evolve(
    model: &FloquetModel,
    mut state: StateVector,
    n_kicks: u64,
    record: &RecorderSpec,
) -> Result<(MetricSeries, StateVector)> {
    model.check_dims(&state)?;
    let mut series = MetricSeries::new();
    let mut channels: Vec<(&str, f64)> = Vec::with_capacity(2);
    for kick in 1..=n_kicks {
        model.step_in_place(&mut state)?;
        let inside = record.window.as_ref().is_some_and(|w| w.contains(kick));
        if !inside {
            if kick % NAN_CHECK_INTERVAL == 0 && !state.norm().is_finite() {
                return Err(Error::NumericalError(alloc::format!("non-finite amplitudes at kick {kick}")));
            }
            continue;
        }
        channels.clear();
        let need_rdm = record.snapshots || record.metric_basis.is_some();
        let rho = need_rdm.then(|| partial_trace_env(&state));
        let mut degenerate = false;
        if let Some(r) = &rho {
            if !r.trace().re.is_finite() {
                return Err(Error::NumericalError(alloc::format!("non-finite RDM at kick {kick}")));
            }
        }
        if let (Some(eta), Some(r)) = (&record.metric_basis, &rho) {
            let (value, flag) =
                if model.d_s() == 2 { distance_with_columns(r, eta)? } else { entropy_with_columns(r, eta)? };
            degenerate = flag;
            channels.push(("d_or_D", value));
        }
        if record.norm {
            let n = state.norm();
            if !n.is_finite() {
                return Err(Error::NumericalError(alloc::format!("non-finite norm at kick {kick}")));
            }
            channels.push(("norm", n));
        }
        let snapshot = if record.snapshots { rho } else { None };
        series.push(kick, snapshot, &channels, degenerate)?;
    }
    Ok((series, state))
}

/// Uniform system superposition times a seeded Haar-random environment.
pub fn default_initial_state(params: &ModelParams, env_seed: u64) -> Result<StateVector> {
    params.validate()?;
    let d_s = params.d_s();
    let amp = Complex64::new(1.0 / libm::sqrt(d_s as f64), 0.0);
    crate::state::make_product_state(&vec![amp; d_s], &haar_random_env(params.d_e, env_seed))
}
