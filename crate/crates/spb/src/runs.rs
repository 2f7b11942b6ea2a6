//! Single trajectories and parameter sweeps written to an output directory.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{dimension_fits, environment_seed, run_trajectory, timeseries_rows, DimensionFits, PointSummary};
use crate::config::{Experiment, RunConfig};
use crate::error::{io_err, Error, Result};
use crate::output::{write_json, write_partial_marker, write_sweep, write_timeseries, VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct Seeds {
    pub master: u64,
    /// `(d_E, seed)` of each environment draw.
    pub environment: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub version: &'static str,
    pub config: RunConfig,
    pub seeds: Seeds,
    /// `σ₁σ₂/√d_E` next to the measured `f̄` (qubit model only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fbar_prediction: Option<f64>,
    #[serde(flatten)]
    pub point: PointSummary,
}

fn prepare_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let marker = out.join(crate::output::PARTIAL_MARKER);
    if marker.exists() {
        std::fs::remove_file(&marker).map_err(io_err(&marker))?;
    }
    Ok(())
}

fn abort_on_numerical(out: &Path, err: Error) -> Error {
    if let Error::Core(spb_core::Error::NumericalError(msg)) = &err {
        if let Err(e) = write_partial_marker(out, msg) {
            return e;
        }
    }
    err
}

/// Runs one trajectory at `cfg.d_e`, `cfg.lambda`; writes `timeseries.csv`
/// (when recorded) and `summary.json`.
pub fn run_evolve(cfg: &RunConfig, out: &Path) -> Result<EvolveSummary> {
    prepare_dir(out)?;
    let traj = run_trajectory(cfg, cfg.d_e, cfg.lambda).map_err(|e| abort_on_numerical(out, e))?;
    if cfg.record.timeseries {
        let rows = timeseries_rows(&traj)?;
        write_timeseries(&out.join("timeseries.csv"), cfg, traj.params.d_s(), &rows)?;
    }
    let p = traj.summary;
    let summary = EvolveSummary {
        version: VERSION,
        config: cfg.clone(),
        seeds: Seeds { master: cfg.seed, environment: vec![(p.d_e, p.environment_seed)] },
        fbar_prediction: (cfg.d_s() == 2).then(|| p.offdiag[0].prediction),
        point: p,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub grid_value: f64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub version: &'static str,
    pub config: RunConfig,
    pub seeds: Seeds,
    pub grid: Vec<f64>,
    pub fbar: Vec<f64>,
    pub delta_f: Vec<f64>,
    pub g: Vec<f64>,
    pub g_bound: Vec<f64>,
    pub sigmas: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<DimensionFits>,
    pub points: Vec<PointSummary>,
    pub failures: Vec<Failure>,
}

/// Runs every grid point of a λ or `d_E` sweep on `workers` threads; rows of
/// `sweep.csv` are sorted by grid value. Failed points are listed in the
/// summary and skipped.
pub fn run_sweep(cfg: &RunConfig, out: &Path, workers: usize) -> Result<SweepSummary> {
    prepare_dir(out)?;
    let jobs: Vec<(f64, usize, f64)> = match cfg.experiment {
        Experiment::SweepLambda => cfg.lambda_grid.iter().map(|&l| (l, cfg.d_e, l)).collect(),
        Experiment::SweepDim => cfg.dim_grid.iter().map(|&d| (d as f64, d, cfg.lambda)).collect(),
        other => return Err(Error::Config(format!("`experiment`: {other:?} is not a sweep"))),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("`workers`: {e}")))?;
    let mut results: Vec<(f64, Result<PointSummary>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(grid, d_e, lambda)| (grid, run_trajectory(cfg, d_e, lambda).map(|t| t.summary)))
            .collect()
    });
    results.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut points = Vec::new();
    let mut grid = Vec::new();
    let mut failures = Vec::new();
    for (g, r) in results {
        match r {
            Ok(p) => {
                grid.push(g);
                points.push(p);
            }
            Err(e) => failures.push(Failure { grid_value: g, error: e.to_string() }),
        }
    }
    let rows: Vec<(f64, &PointSummary)> = grid.iter().copied().zip(&points).collect();
    write_sweep(&out.join("sweep.csv"), cfg, cfg.d_s(), &rows)?;
    let slope =
        if cfg.experiment == Experiment::SweepDim && points.len() >= 3 { Some(dimension_fits(&points)?) } else { None };
    let mut env: Vec<(usize, u64)> = points.iter().map(|p| (p.d_e, environment_seed(cfg.seed, p.d_e))).collect();
    env.dedup();
    let summary = SweepSummary {
        version: VERSION,
        config: cfg.clone(),
        seeds: Seeds { master: cfg.seed, environment: env },
        fbar: points.iter().map(|p| p.fbar).collect(),
        delta_f: points.iter().map(|p| p.delta_f).collect(),
        g: points.iter().map(|p| p.g).collect(),
        g_bound: points.iter().map(|p| p.g_bound).collect(),
        sigmas: points.iter().map(|p| p.sigmas.clone()).collect(),
        grid,
        slope,
        points,
        failures,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}
