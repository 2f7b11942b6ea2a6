//! Independent dense Floquet matrix for small grids.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use spb_core::linalg::{identity, kron, pauli_x, pauli_z, CMatrix, CVector};
use spb_core::qkr::{build_model, floquet_step, ModelParams};
use spb_core::rng::{complex_gaussian, seeded_rng};
use spb_core::state::StateVector;

/// `exp(−iH)` by Taylor series with scaling and squaring; only used on
/// generators of modest norm.
pub fn expm_minus_i(h: &CMatrix) -> CMatrix {
    let d = h.nrows();
    let norm: f64 = h.iter().map(|z| z.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = h.map(|z| z * Complex64::new(0.0, -scale));
    let mut term = CMatrix::identity(d, d);
    let mut sum = CMatrix::identity(d, d);
    for n in 1..30 {
        term = &term * &a / Complex64::new(n as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Explicit `U_T` on the flattened `(branch, grid)` space, assembled from the
/// unitary DFT `F_{mn} = d^{-1/2} e^{−imθ_n}` with `m = −d/2..d/2−1`,
/// `θ_n = 2πn/d`, `n = 1..d`.
pub fn dense_floquet(p: &ModelParams, u_s: &CMatrix, signs: &[f64]) -> CMatrix {
    let d = p.d_e;
    let hbar = 2.0 * PI / d as f64;
    let k = p.k_cap / hbar;
    let theta = |n: usize| 2.0 * PI * n as f64 / d as f64;
    let ms: Vec<i64> = (0..d as i64).map(|q| q - d as i64 / 2).collect();
    let f = CMatrix::from_fn(d, d, |r, col| {
        Complex64::from_polar(1.0 / (d as f64).sqrt(), -(ms[r] as f64) * theta(col + 1))
    });
    let free = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        ms.iter().map(|&m| Complex64::from_polar(1.0, -hbar * (m * m) as f64 / 2.0)),
    ));
    let env_part = f.adjoint() * free * &f;
    let d_s = signs.len();
    let mut block = CMatrix::zeros(d_s * d, d_s * d);
    for (b, &z) in signs.iter().enumerate() {
        let kick = CMatrix::from_diagonal(&CVector::from_iterator(
            d,
            (1..=d).map(|n| Complex64::from_polar(1.0, -(k + p.lambda * z) * theta(n).cos())),
        ));
        block.view_mut((b * d, b * d), (d, d)).copy_from(&(&env_part * kick));
    }
    kron(u_s, &identity(d)) * block
}

pub fn random_state(d_s: usize, d_e: usize, seed: u64) -> StateVector {
    let mut rng = seeded_rng(seed);
    let amps = (0..d_s * d_e).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    StateVector::from_amplitudes(d_s, d_e, amps).unwrap().normalized().unwrap()
}

/// Largest amplitude error between split-operator stepping and the dense
/// matrix over `seeds` random states and `kicks` steps each.
pub fn max_dense_error(p: &ModelParams, u_s: &CMatrix, signs: &[f64], seeds: u64, kicks: usize) -> f64 {
    let model = build_model(p.clone()).unwrap();
    let dense = dense_floquet(p, u_s, signs);
    let mut worst = 0.0f64;
    for seed in 0..seeds {
        let mut psi = random_state(signs.len(), p.d_e, 1000 + seed);
        let mut v = CVector::from_column_slice(psi.amplitudes());
        for _ in 0..kicks {
            psi = floquet_step(&model, &psi).unwrap();
            v = &dense * v;
            let err = psi.amplitudes().iter().zip(v.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    worst
}

pub fn qubit_unitary(p: &ModelParams, x: f64, z: f64) -> CMatrix {
    let hbar = p.hbar_eff();
    expm_minus_i(&(pauli_x().scale(x * hbar) + pauli_z().scale(z * hbar)))
}

pub fn two_qubit_unitary(p: &ModelParams, xs: f64, zs: f64, xa: f64, eps: f64) -> CMatrix {
    let hbar = p.hbar_eff();
    let id = identity(2);
    let gen = kron(&pauli_x(), &id).scale(xs * hbar)
        + kron(&pauli_z(), &id).scale(zs * hbar)
        + kron(&id, &pauli_x()).scale(xa * hbar)
        + kron(&pauli_z(), &pauli_z()).scale(eps * hbar);
    expm_minus_i(&gen)
}
