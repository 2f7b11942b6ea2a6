//! Run configuration: JSON on disk, defaults filled and validated on load.

use std::path::Path;

use serde::{Deserialize, Serialize};
use spb_core::qkr::ModelParams;
use spb_core::series::WindowSpec;

use crate::error::{io_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Evolve,
    SweepLambda,
    SweepDim,
    Oracle,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Qubit,
    TwoQubit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordConfig {
    /// Write the per-kick `timeseries.csv`.
    #[serde(default = "yes")]
    pub timeseries: bool,
}

impl Default for RecordConfig {
    fn default() -> Self {
        Self { timeseries: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleSuite {
    FiniteDifference,
    Renormalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub suites: Vec<OracleSuite>,
    /// Random instances for the derivative check.
    pub instances: usize,
    pub fd_tolerance: f64,
    /// Environment dimension of the paired bare/renormalised comparison.
    pub renorm_d_e: usize,
    pub renorm_instances: usize,
    pub renorm_win_fraction: f64,
    pub scaling_dims: Vec<usize>,
    pub scaling_instances: usize,
    pub scaling_slope: (f64, f64),
    /// Scan times per instance, spread over `[burn-in, 2·burn-in]`.
    pub scan_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            suites: vec![OracleSuite::FiniteDifference, OracleSuite::Renormalization],
            instances: 50,
            fd_tolerance: 1e-6,
            renorm_d_e: 128,
            renorm_instances: 20,
            renorm_win_fraction: 0.9,
            scaling_dims: vec![64, 128, 256, 512],
            scaling_instances: 4,
            scaling_slope: (-0.7, -0.3),
            scan_points: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    BoundedRandom,
    Cosine,
    Constant,
    PowerGrowth,
    Gram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StochasticConfig {
    pub scans: Vec<ScanKind>,
    pub sigmas: Vec<f64>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub slope_tolerance: f64,
}

impl Default for StochasticConfig {
    fn default() -> Self {
        Self {
            scans: vec![
                ScanKind::BoundedRandom,
                ScanKind::Cosine,
                ScanKind::Constant,
                ScanKind::PowerGrowth,
                ScanKind::Gram,
            ],
            sigmas: vec![0.8, 0.6],
            dims: (6..=16).map(|k| 1 << k).collect(),
            trials: 100,
            slope_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_experiment")]
    pub experiment: Experiment,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(rename = "d_E", default = "default_d_e")]
    pub d_e: usize,
    #[serde(rename = "K", default = "default_k")]
    pub k: f64,
    #[serde(default)]
    pub lambda: f64,
    /// In units of `ħ_eff`: `[Ω_x, Ω_z]` or `[Ω_x^s, Ω_z^s, Ω_x^A, ε]`.
    #[serde(default)]
    pub omegas: Vec<f64>,
    #[serde(default = "default_n_kicks")]
    pub n_kicks: u64,
    #[serde(default = "default_window")]
    pub window: (u64, u64),
    #[serde(default = "one")]
    pub stride: u64,
    /// Master seed; the environment of a trajectory at dimension `d_E` is
    /// drawn from `derive_seed(seed, d_E)`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub dim_grid: Vec<usize>,
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default)]
    pub record: RecordConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub stochastic: StochasticConfig,
}

fn yes() -> bool {
    true
}
fn one() -> u64 {
    1
}
fn default_experiment() -> Experiment {
    Experiment::Evolve
}
fn default_model() -> ModelKind {
    ModelKind::Qubit
}
fn default_d_e() -> usize {
    4096
}
fn default_k() -> f64 {
    90.0
}
fn default_n_kicks() -> u64 {
    40_000
}
fn default_window() -> (u64, u64) {
    (30_001, 40_000)
}
fn default_output() -> String {
    "out".into()
}

pub fn default_omegas(model: ModelKind) -> Vec<f64> {
    match model {
        ModelKind::Qubit => vec![0.8e3, 0.8e3],
        ModelKind::TwoQubit => vec![0.5e3, 1.0e3, 1.5e3, 1.0e3],
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut c: RunConfig = serde_json::from_str("{}").expect("all fields have defaults");
        c.fill_defaults();
        c
    }
}

impl RunConfig {
    pub fn fill_defaults(&mut self) {
        if self.omegas.is_empty() {
            self.omegas = default_omegas(self.model);
        }
    }

    pub fn d_s(&self) -> usize {
        match self.model {
            ModelKind::Qubit => 2,
            ModelKind::TwoQubit => 4,
        }
    }

    pub fn window_spec(&self) -> Result<WindowSpec> {
        Ok(WindowSpec::with_stride(self.window.0, self.window.1, self.stride)?)
    }

    pub fn model_params(&self, d_e: usize, lambda: f64) -> ModelParams {
        let o = &self.omegas;
        match self.model {
            ModelKind::Qubit => ModelParams::qubit(d_e, self.k, lambda, o[0], o[1]),
            ModelKind::TwoQubit => ModelParams::two_qubit(d_e, self.k, lambda, o[0], o[1], o[2], o[3]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Config(format!("`{field}`: {why}")));
        let expected = match self.model {
            ModelKind::Qubit => 2,
            ModelKind::TwoQubit => 4,
        };
        if self.omegas.len() != expected {
            return bad("omegas", format!("{:?} needs {expected} values, got {}", self.model, self.omegas.len()));
        }
        if self.omegas.iter().any(|w| !w.is_finite()) || !self.lambda.is_finite() {
            return bad("omegas", "non-finite value".into());
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return bad("K", format!("{} must be finite and non-negative", self.k));
        }
        let dims_ok = |d: usize| d >= 2 && d.is_power_of_two();
        if !dims_ok(self.d_e) {
            return bad("d_E", format!("{} is not a power of two ≥ 2", self.d_e));
        }
        if self.n_kicks == 0 {
            return bad("n_kicks", "must be positive".into());
        }
        let (t_a, t_b) = self.window;
        if t_a < 1 || t_a > t_b || t_b > self.n_kicks {
            return bad("window", format!("[{t_a}, {t_b}] is not inside [1, {}]", self.n_kicks));
        }
        if self.stride == 0 {
            return bad("stride", "must be positive".into());
        }
        if let Some(d) = self.dim_grid.iter().find(|&&d| !dims_ok(d)) {
            return bad("dim_grid", format!("{d} is not a power of two ≥ 2"));
        }
        if self.lambda_grid.iter().any(|l| !l.is_finite()) {
            return bad("lambda_grid", "non-finite value".into());
        }
        match self.experiment {
            Experiment::SweepLambda if self.lambda_grid.is_empty() => {
                return bad("lambda_grid", "empty for a λ sweep".into())
            }
            Experiment::SweepDim if self.dim_grid.is_empty() => return bad("dim_grid", "empty for a d_E sweep".into()),
            Experiment::Oracle if self.oracle.suites.is_empty() => {
                return bad("oracle.suites", "no suite selected".into())
            }
            Experiment::Stochastic if self.stochastic.scans.is_empty() => {
                return bad("stochastic.scans", "no scan selected".into())
            }
            _ => {}
        }
        if self.oracle.scaling_dims.len() < 3 || self.oracle.scaling_dims.windows(2).any(|w| w[0] >= w[1]) {
            return bad("oracle.scaling_dims", "needs at least 3 increasing dimensions".into());
        }
        if self.stochastic.dims.len() < 3 || self.stochastic.dims.windows(2).any(|w| w[0] >= w[1]) {
            return bad("stochastic.dims", "needs at least 3 increasing dimensions".into());
        }
        if self.stochastic.trials < 30 {
            return bad("stochastic.trials", format!("{} < 30", self.stochastic.trials));
        }
        Ok(())
    }
}

/// Parses a JSON config, fills defaults and validates it.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        Error::Config(format!("key `{key}`: {}", e.into_inner()))
    })?;
    cfg.fill_defaults();
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_config(cfg: &RunConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(cfg)?;
    std::fs::write(path, text + "\n").map_err(io_err(path))
}
