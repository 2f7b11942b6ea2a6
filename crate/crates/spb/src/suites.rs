//! Pass/fail suites over the dense oracle and the stochastic scans.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use spb_core::linalg::{max_abs_diff, trace};
use spb_core::metrics::loglog_slope;
use spb_core::oracle::{
    default_burn_in, finite_difference_error, random_instance, renormalize, rhs_elements, scan_with, ExactPropagator,
    GoeInstanceSpec,
};
use spb_core::rdm::BasisSpec;
use spb_core::rng::derive_seed;
use spb_core::stochastic::{convergence_scan, gram_scan, SpectrumSpec};

use crate::config::{OracleConfig, OracleSuite, RunConfig, ScanKind, StochasticConfig};
use crate::error::Result;
use crate::output::{write_json, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub requirement: String,
    pub passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self { name: name.into(), measured, requirement: format!("< {limit:e}"), passed: measured < limit }
    }

    fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            requirement: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&measured),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub version: &'static str,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Derivative law against finite differences on random instances
/// (`d_S ∈ {2, 4}`, `d_E ∈ {8, 16, 32}`, one to three coupling terms),
/// plus trace and Hermiticity of the derivative.
pub fn finite_difference_checks(cfg: &OracleConfig, seed: u64) -> Result<Vec<Check>> {
    let results: Vec<(f64, f64, f64)> = (0..cfg.instances as u64)
        .into_par_iter()
        .map(|k| {
            let d_s = [2, 4][(k % 2) as usize];
            let d_e = [8, 16, 32][(k % 3) as usize];
            let (h, psi) = random_instance(d_s, d_e, 1 + (k % 3) as usize, derive_seed(seed, k))?;
            let basis = if k % 4 < 2 { BasisSpec::Computational } else { BasisSpec::SystemEigenbasis(h.h_s().clone()) };
            let err = finite_difference_error(&h, &psi, &basis)?;
            let rhs = rhs_elements(&psi, &h, &basis)?;
            Ok((err, trace(&rhs).norm(), max_abs_diff(&rhs, &rhs.adjoint())))
        })
        .collect::<Result<_>>()?;
    let worst = |f: fn(&(f64, f64, f64)) -> f64| results.iter().map(f).fold(0.0, f64::max);
    Ok(vec![
        Check::below("finite_difference.max_relative_error", worst(|r| r.0), cfg.fd_tolerance),
        Check::below("finite_difference.max_trace", worst(|r| r.1), 1e-10),
        Check::below("finite_difference.max_antihermiticity", worst(|r| r.2), 1e-10),
    ])
}

/// Median commutator norms of one GOE instance against `H_S` and `H̃_S`.
pub fn instance_medians(d_e: usize, seed: u64, scan_points: usize) -> Result<(f64, f64)> {
    let (h, psi) = GoeInstanceSpec::new(d_e).build(seed)?;
    let prop = ExactPropagator::new(&h)?;
    let burn = default_burn_in(&prop);
    let times: Vec<f64> = (0..scan_points).map(|k| burn * (1.0 + k as f64 / scan_points as f64)).collect();
    let tilde = renormalize(&h).h_s_tilde;
    let norms = scan_with(&prop, &psi, &times, &[h.h_s(), &tilde], burn)?;
    let mut it = norms.into_iter();
    Ok((median(it.next().unwrap_or_default()), median(it.next().unwrap_or_default())))
}

/// Paired bare/renormalised comparison at `renorm_d_e` and the `d_E` scaling
/// of the renormalised median.
pub fn renormalization_checks(cfg: &OracleConfig, seed: u64) -> Result<Vec<Check>> {
    let d = cfg.renorm_d_e;
    let paired: Vec<(f64, f64)> = (0..cfg.renorm_instances as u64)
        .into_par_iter()
        .map(|k| instance_medians(d, derive_seed(derive_seed(seed, d as u64), k), cfg.scan_points))
        .collect::<Result<_>>()?;
    let wins = paired.iter().filter(|(bare, ren)| ren < bare).count();
    let fraction = wins as f64 / paired.len().max(1) as f64;

    let points: Vec<(f64, f64)> = cfg
        .scaling_dims
        .par_iter()
        .map(|&d| {
            let meds = (0..cfg.scaling_instances as u64)
                .map(|k| instance_medians(d, derive_seed(derive_seed(seed, d as u64), k), cfg.scan_points).map(|m| m.1))
                .collect::<Result<Vec<_>>>()?;
            Ok((d as f64, median(meds)))
        })
        .collect::<Result<_>>()?;
    let fit = loglog_slope(&points)?;
    let mut checks = vec![
        Check::within("renormalization.win_fraction", fraction, cfg.renorm_win_fraction, 1.0),
        Check::within("renormalization.slope", fit.slope, cfg.scaling_slope.0, cfg.scaling_slope.1),
    ];
    checks.extend(points.iter().map(|&(d, m)| Check {
        name: format!("renormalization.median_norm.d{d}"),
        measured: m,
        requirement: "reported".into(),
        passed: true,
    }));
    Ok(checks)
}

pub fn oracle_checks(cfg: &OracleConfig, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for suite in &cfg.suites {
        match suite {
            OracleSuite::FiniteDifference => checks.extend(finite_difference_checks(cfg, derive_seed(seed, 1))?),
            OracleSuite::Renormalization => checks.extend(renormalization_checks(cfg, derive_seed(seed, 2))?),
        }
    }
    Ok(checks)
}

fn scan_id(kind: ScanKind) -> u64 {
    match kind {
        ScanKind::BoundedRandom => 1,
        ScanKind::Cosine => 2,
        ScanKind::Constant => 3,
        ScanKind::PowerGrowth => 4,
        ScanKind::Gram => 5,
    }
}

/// RMS convergence slopes for each selected scan at `(i=j)` and `(i≠j)`.
pub fn stochastic_checks(cfg: &StochasticConfig, seed: u64) -> Result<Vec<Check>> {
    let jobs: Vec<(ScanKind, (usize, usize))> = cfg.scans.iter().flat_map(|&k| [(k, (0, 0)), (k, (0, 1))]).collect();
    jobs.par_iter()
        .map(|&(kind, pair)| {
            let s = derive_seed(seed, scan_id(kind) * 16 + (pair.0 * 4 + pair.1) as u64);
            let fit = match kind {
                ScanKind::Gram => gram_scan(&cfg.sigmas, &cfg.dims, cfg.trials, pair, s)?,
                _ => {
                    let spectrum = match kind {
                        ScanKind::BoundedRandom => SpectrumSpec::BoundedRandom { seed: derive_seed(s, 0) },
                        ScanKind::Cosine => SpectrumSpec::Cosine,
                        ScanKind::Constant => SpectrumSpec::Constant(1.0),
                        _ => SpectrumSpec::PowerGrowth { exponent: 0.25 },
                    };
                    convergence_scan(&spectrum, &cfg.sigmas, &cfg.dims, cfg.trials, pair, s)?
                }
            };
            let label = if pair.0 == pair.1 { "diagonal" } else { "offdiagonal" };
            let name = format!("{}.{label}.slope", serde_json::to_value(kind)?.as_str().unwrap_or("scan"));
            Ok(Check::within(name, fit.slope, -0.5 - cfg.slope_tolerance, -0.5 + cfg.slope_tolerance))
        })
        .collect()
}

fn report(cfg: &RunConfig, checks: Vec<Check>, out: &Path, file: &str) -> Result<SuiteReport> {
    std::fs::create_dir_all(out).map_err(crate::error::io_err(out))?;
    let passed = checks.iter().all(|c| c.passed);
    let r = SuiteReport { version: VERSION, config: cfg.clone(), checks, passed };
    write_json(&out.join(file), &r)?;
    Ok(r)
}

pub fn run_oracle(cfg: &RunConfig, out: &Path, workers: usize) -> Result<SuiteReport> {
    let checks = with_workers(workers, || oracle_checks(&cfg.oracle, cfg.seed))?;
    report(cfg, checks, out, "oracle_report.json")
}

pub fn run_stochastic(cfg: &RunConfig, out: &Path, workers: usize) -> Result<SuiteReport> {
    let checks = with_workers(workers, || stochastic_checks(&cfg.stochastic, cfg.seed))?;
    report(cfg, checks, out, "stochastic_report.json")
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| crate::error::Error::Config(format!("`workers`: {e}")))?;
    pool.install(f)
}
