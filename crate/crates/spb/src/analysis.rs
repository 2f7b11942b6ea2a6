//! One trajectory: propagation plus every scalar diagnostic, with RDM
//! elements taken in the energy basis of the system generator.

use serde::Serialize;
use spb_core::density::DensityMatrix;
use spb_core::linalg::CMatrix;
use spb_core::metrics::{
    complex_deviation_of, depolarization_distance, element_channel, f_channel, g_bound_model2, g_energy_diag,
    g_rms_qubit, loglog_slope, offdiag_prediction, time_averaged_metric, trace_distance, ScalingFit,
};
use spb_core::numeric::mean_and_std;
use spb_core::qkr::{build_model, default_initial_state, evolve, ModelParams, RecorderSpec};
use spb_core::rdm::{measured_sigmas, time_average, BasisSpec};
use spb_core::rng::derive_seed;
use spb_core::series::{MetricSeries, WindowSpec};

use crate::config::RunConfig;
use crate::error::Result;

/// Environment seed of every trajectory at dimension `d_e`.
pub fn environment_seed(master: u64, d_e: usize) -> u64 {
    derive_seed(master, d_e as u64)
}

/// Off-diagonal index pairs `(i, j)`, `i < j`, in row order.
pub fn offdiag_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffdiagStat {
    pub i: usize,
    pub j: usize,
    /// `√⟨|ρ_ij − ⟨ρ_ij⟩|²⟩` over the window.
    pub deviation: f64,
    /// `σ_i σ_j / √d_E`.
    pub prediction: f64,
    /// Window mean of `|ρ_ij|`.
    pub mean_modulus: f64,
}

/// Scalar results of one trajectory. Indices are 1-based in labels and
/// 0-based in fields; energy levels run upward.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub d_e: usize,
    pub lambda: f64,
    pub environment_seed: u64,
    pub n_t: usize,
    pub fbar: f64,
    pub delta_f: f64,
    /// Deviation of the (1,2) element.
    pub delta_rho_offdiag: f64,
    pub offdiag: Vec<OffdiagStat>,
    pub g: f64,
    pub g_bound: f64,
    pub sigmas: Vec<f64>,
    pub dbar_or_dbar: f64,
    pub depol: f64,
    pub degenerate_fraction: f64,
    /// `|‖ψ(n_kicks)‖ − ‖ψ(0)‖|`.
    pub norm_drift: f64,
    pub energy_levels: Vec<f64>,
}

pub struct Trajectory {
    pub params: ModelParams,
    pub window: WindowSpec,
    pub series: MetricSeries,
    pub energy_basis: CMatrix,
    pub rho_bar: DensityMatrix,
    pub summary: PointSummary,
}

/// Propagates the default initial state and evaluates all diagnostics.
pub fn run_trajectory(cfg: &RunConfig, d_e: usize, lambda: f64) -> Result<Trajectory> {
    let params = cfg.model_params(d_e, lambda);
    let model = build_model(params.clone())?;
    let env_seed = environment_seed(cfg.seed, d_e);
    let psi0 = default_initial_state(&params, env_seed)?;
    let initial_norm = psi0.norm();
    let window = cfg.window_spec()?;
    let energy = model.energy_basis().clone();
    let record =
        RecorderSpec { window: Some(window), snapshots: true, metric_basis: Some(energy.clone()), norm: false };
    let (series, last) = evolve(&model, psi0, cfg.n_kicks, &record)?;
    let norm_drift = (last.norm() - initial_norm).abs();
    let basis = BasisSpec::Explicit(energy.clone());

    let rho_bar = time_average(&series, &window)?;
    let f = f_channel(&series, &window)?;
    let (fbar, delta_f) = mean_and_std(&f).expect("window is non-empty");
    let sigmas = measured_sigmas(&rho_bar, &basis)?;
    let d_s = params.d_s();
    let n_t = series.window_positions(&window)?.len();
    let offdiag = offdiag_pairs(d_s)
        .into_iter()
        .map(|(i, j)| {
            let values = element_channel(&series, i, j, &window, &basis)?;
            Ok(OffdiagStat {
                i,
                j,
                deviation: complex_deviation_of(&values),
                prediction: offdiag_prediction(sigmas[i], sigmas[j], d_e),
                mean_modulus: values.iter().map(|z| z.norm()).sum::<f64>() / values.len() as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let g = g_energy_diag(&rho_bar, &basis)?;
    let g_bound =
        if d_s == 2 { g_rms_qubit(sigmas[0], sigmas[1], d_e, n_t) } else { g_bound_model2(&sigmas, d_s, d_e, n_t)? };
    let positions = series.window_positions(&window)?;
    let degenerate = positions.iter().filter(|&&p| series.degenerate_flags()[p]).count();
    let levels = spb_core::linalg::hermitian_eig(model.system_generator())?.values.into_iter().rev().collect();
    let summary = PointSummary {
        d_e,
        lambda,
        environment_seed: env_seed,
        n_t,
        fbar,
        delta_f,
        delta_rho_offdiag: offdiag[0].deviation,
        offdiag,
        g,
        g_bound,
        dbar_or_dbar: time_averaged_metric(&series, "d_or_D", &window)?,
        depol: depolarization_distance(&rho_bar)?,
        degenerate_fraction: degenerate as f64 / n_t as f64,
        norm_drift,
        sigmas,
        energy_levels: levels,
    };
    check_finite(&summary)?;
    Ok(Trajectory { params, window, series, energy_basis: energy, rho_bar, summary })
}

fn check_finite(s: &PointSummary) -> Result<()> {
    let scalars = [s.fbar, s.delta_f, s.delta_rho_offdiag, s.g, s.g_bound, s.dbar_or_dbar, s.depol, s.norm_drift];
    if scalars.iter().chain(&s.sigmas).any(|v| !v.is_finite()) {
        return Err(spb_core::Error::NumericalError(format!(
            "non-finite diagnostic at d_E = {}, λ = {}",
            s.d_e, s.lambda
        ))
        .into());
    }
    Ok(())
}

/// Per-kick rows of the time series: `f`, energy-basis populations and
/// coherences, `d` or `D`, and the distance of `ρ(t)` from `I/d_S`.
pub struct TimeseriesRow {
    pub kick: u64,
    pub f: f64,
    pub populations: Vec<f64>,
    pub coherences: Vec<(f64, f64)>,
    pub d_or_d: f64,
    pub depol: f64,
}

pub fn timeseries_rows(t: &Trajectory) -> Result<Vec<TimeseriesRow>> {
    let f = f_channel(&t.series, &t.window)?;
    let positions = t.series.window_positions(&t.window)?;
    let d_s = t.params.d_s();
    let mixed = DensityMatrix::maximally_mixed(d_s);
    let pairs = offdiag_pairs(d_s);
    let d_channel = t.series.channel("d_or_D").expect("recorded by run_trajectory");
    positions
        .iter()
        .zip(f)
        .map(|(&p, f)| {
            let rho = &t.series.snapshots()[p];
            let e = rho.in_basis(&t.energy_basis);
            Ok(TimeseriesRow {
                kick: t.series.kick_indices()[p],
                f,
                populations: (0..d_s).map(|k| e[(k, k)].re).collect(),
                coherences: pairs.iter().map(|&(i, j)| (e[(i, j)].re, e[(i, j)].im)).collect(),
                d_or_d: d_channel[p],
                depol: trace_distance(rho, &mixed)?,
            })
        })
        .collect()
}

/// Fits of `f̄`, `Δf` and `Δρ₁₂` against `d_E`.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionFits {
    pub fbar: FitRecord,
    pub delta_f: FitRecord,
    pub delta_rho_offdiag: FitRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRecord {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

impl From<ScalingFit> for FitRecord {
    fn from(f: ScalingFit) -> Self {
        Self { slope: f.slope, intercept: f.intercept, residual: f.residual }
    }
}

pub fn dimension_fits(points: &[PointSummary]) -> Result<DimensionFits> {
    let fit = |value: fn(&PointSummary) -> f64| -> Result<FitRecord> {
        let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.d_e as f64, value(p))).collect();
        Ok(loglog_slope(&pts)?.into())
    };
    Ok(DimensionFits {
        fbar: fit(|p| p.fbar)?,
        delta_f: fit(|p| p.delta_f)?,
        delta_rho_offdiag: fit(|p| p.delta_rho_offdiag)?,
    })
}
