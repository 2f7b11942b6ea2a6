use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spb::config::{load_config, Experiment, RunConfig};
use spb::runs::{run_evolve, run_sweep};
use spb::suites::{run_oracle, run_stochastic, SuiteReport};

#[derive(Parser)]
#[command(name = "spb", version, about = "Kicked-rotor open-system experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single trajectory: timeseries.csv and summary.json
    Evolve(Common),
    /// One trajectory per λ in `lambda_grid`: sweep.csv and summary.json
    SweepLambda(Common),
    /// One trajectory per d_E in `dim_grid`, with scaling fits
    SweepDim(Common),
    /// Derivative-law and renormalisation checks
    Oracle(Common),
    /// Monte Carlo convergence scans
    Stochastic(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply to missing keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn prepare(common: &Common, experiment: Experiment) -> spb::Result<(RunConfig, PathBuf)> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    cfg.experiment = experiment;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output = out.display().to_string();
    }
    cfg.validate()?;
    let out = PathBuf::from(&cfg.output);
    Ok((cfg, out))
}

fn print_report(r: &SuiteReport) {
    for c in &r.checks {
        println!("{} {} = {:e} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured, c.requirement);
    }
}

fn run(cli: Cli) -> spb::Result<bool> {
    let (common, experiment) = match &cli.command {
        Command::Evolve(c) => (c, Experiment::Evolve),
        Command::SweepLambda(c) => (c, Experiment::SweepLambda),
        Command::SweepDim(c) => (c, Experiment::SweepDim),
        Command::Oracle(c) => (c, Experiment::Oracle),
        Command::Stochastic(c) => (c, Experiment::Stochastic),
    };
    let (cfg, out) = prepare(common, experiment)?;
    match experiment {
        Experiment::Evolve => {
            let s = run_evolve(&cfg, &out)?;
            println!(
                "fbar = {:e}, delta_f = {:e}, g = {:e} (bound {:e})",
                s.point.fbar, s.point.delta_f, s.point.g, s.point.g_bound
            );
            Ok(true)
        }
        Experiment::SweepLambda | Experiment::SweepDim => {
            let s = run_sweep(&cfg, &out, common.workers)?;
            for f in &s.failures {
                eprintln!("grid point {} failed: {}", f.grid_value, f.error);
            }
            if let Some(fit) = &s.slope {
                println!(
                    "slopes: fbar {:.4}, delta_f {:.4}, delta_rho {:.4}",
                    fit.fbar.slope, fit.delta_f.slope, fit.delta_rho_offdiag.slope
                );
            }
            Ok(s.failures.is_empty())
        }
        Experiment::Oracle => {
            let r = run_oracle(&cfg, &out, common.workers)?;
            print_report(&r);
            Ok(r.passed)
        }
        Experiment::Stochastic => {
            let r = run_stochastic(&cfg, &out, common.workers)?;
            print_report(&r);
            Ok(r.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
