//! CSV and JSON writers. Every file opens with `#` lines carrying the code
//! version and the compact config, then the column header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::{offdiag_pairs, PointSummary, TimeseriesRow};
use crate::config::RunConfig;
use crate::error::{io_err, Error, Result};

pub const VERSION: &str = concat!("spb ", env!("CARGO_PKG_VERSION"));

/// Name of the marker left in an output directory by an aborted run.
pub const PARTIAL_MARKER: &str = "PARTIAL";

pub fn timeseries_header(d_s: usize) -> Vec<String> {
    let mut h = vec!["kick".to_string(), "f".to_string()];
    h.extend((1..=d_s).map(|k| format!("rho{k}{k}")));
    for (i, j) in offdiag_pairs(d_s) {
        h.push(format!("re_rho{}{}", i + 1, j + 1));
        h.push(format!("im_rho{}{}", i + 1, j + 1));
    }
    h.push("d_or_D".into());
    h.push("depol".into());
    h
}

pub fn sweep_header(d_s: usize) -> Vec<String> {
    let mut h: Vec<String> =
        ["grid_value", "fbar", "delta_f", "delta_rho_offdiag", "g", "g_bound", "dbar_or_Dbar", "depol"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    h.extend((1..=d_s).map(|k| format!("sigma{k}")));
    h
}

fn csv_writer(path: &Path, cfg: &RunConfig) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# {VERSION}").map_err(io_err(path))?;
    writeln!(out, "# config: {}", serde_json::to_string(cfg)?).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(out))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_timeseries(path: &Path, cfg: &RunConfig, d_s: usize, rows: &[TimeseriesRow]) -> Result<()> {
    let mut w = csv_writer(path, cfg)?;
    w.write_record(timeseries_header(d_s)).map_err(csv_err(path))?;
    for r in rows {
        let mut rec = vec![r.kick.to_string(), num(r.f)];
        rec.extend(r.populations.iter().map(|&p| num(p)));
        for &(re, im) in &r.coherences {
            rec.push(num(re));
            rec.push(num(im));
        }
        rec.push(num(r.d_or_d));
        rec.push(num(r.depol));
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_sweep(path: &Path, cfg: &RunConfig, d_s: usize, rows: &[(f64, &PointSummary)]) -> Result<()> {
    let mut w = csv_writer(path, cfg)?;
    w.write_record(sweep_header(d_s)).map_err(csv_err(path))?;
    for (grid, p) in rows {
        let mut rec: Vec<String> =
            [*grid, p.fbar, p.delta_f, p.delta_rho_offdiag, p.g, p.g_bound, p.dbar_or_dbar, p.depol]
                .iter()
                .map(|&v| num(v))
                .collect();
        rec.extend(p.sigmas.iter().map(|&s| num(s)));
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(io_err(path))
}

/// Leaves a marker describing why a run stopped before writing its outputs.
pub fn write_partial_marker(dir: &Path, reason: &str) -> Result<()> {
    let path = dir.join(PARTIAL_MARKER);
    std::fs::write(&path, format!("{VERSION}\n{reason}\n")).map_err(io_err(&path))
}
