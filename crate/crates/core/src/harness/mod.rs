//! Experiment configuration, subcommand drivers, reports and the acceptance
//! suite behind the `rankone` binary.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod report;

use num_complex::Complex64;

pub use commands::{CommandOutput, Tolerances};
pub use config::{ExperimentConfig, MeasureSource};
pub use report::{Check, RunReport};

use crate::error::{Error, Result};
use crate::measure::{Measure, Support};
use crate::model::DEFAULT_GRID;
use crate::sio::Family;
use commands::{ClarkVerifyRequest, RegularizeRequest, Route};

pub const SUBCOMMANDS: [&str; 7] =
    ["spectrum-scan", "clark-verify", "regularize", "schur-test", "model-check", "dissipative", "acceptance"];

/// Support assumed for presets when a subcommand is given a bare preset.
pub fn default_support(subcommand: &str) -> Support {
    match subcommand {
        "clark-verify" | "model-check" => Support::Circle,
        _ => Support::Line,
    }
}

fn default_measure(subcommand: &str) -> Result<Measure> {
    match subcommand {
        "clark-verify" | "model-check" => Measure::atomic(Support::Circle, &[(-2.0, 0.2), (0.1, 0.5), (1.9, 0.3)]),
        _ => Ok(commands::default_line_measure()),
    }
}

fn complex(v: &[f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Runs the subcommand described by `cfg`. Configuration problems are
/// errors; failures of individual checks are recorded in the report.
pub fn run(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let sub = cfg.subcommand.as_str();
    if !SUBCOMMANDS.contains(&sub) {
        return Err(Error::config("subcommand", format!("unknown subcommand `{sub}`")));
    }
    let tol = Tolerances(cfg.tolerances.clone());
    let seed = cfg.seed.unwrap_or(config::DEFAULT_SEED);
    let grid = cfg.grid.unwrap_or(DEFAULT_GRID);
    let alphas: Vec<Complex64> = cfg.alpha.iter().map(complex).collect();
    let measure = || match &cfg.measure {
        Some(src) => src.build(),
        None => default_measure(sub),
    };
    let mut out = match sub {
        "spectrum-scan" => commands::spectrum_scan(&measure()?, &alphas, &tol)?,
        "clark-verify" => {
            let route = Route::parse(cfg.route.as_deref().unwrap_or("all"))?;
            let mu = measure()?;
            let req = ClarkVerifyRequest { measure: &mu, alphas: &alphas, gamma: cfg.gamma.as_ref().map(complex), route, grid, seed };
            commands::clark_verify(&req, &tol)?
        }
        "regularize" => {
            let kernel = commands::kernel_from_name(cfg.kernel.as_deref().unwrap_or("hilbert"), cfg.kernel_json.as_deref())?;
            let family = Family::parse(cfg.family.as_deref().unwrap_or("cauchy"))?;
            let eps = cfg.eps_grid.clone().unwrap_or_else(commands::default_eps_grid);
            let mu = measure()?;
            let req = RegularizeRequest { measure: &mu, kernel: &kernel, family, eps_grid: &eps, alphas: &alphas, seed };
            commands::regularize(&req, &tol)?
        }
        "schur-test" => commands::schur_test(cfg.pairs.unwrap_or(100), seed, &tol)?,
        "model-check" => {
            let gamma = cfg.gamma.as_ref().map(complex).unwrap_or_default();
            commands::model_check_command(&measure()?, gamma, grid, &tol)?
        }
        "dissipative" => {
            let [alpha] = alphas[..] else {
                return Err(Error::config("alpha", "the dissipative bridge takes exactly one α"));
            };
            commands::dissipative(&measure()?, alpha, cfg.grid.unwrap_or(512), &tol)?
        }
        _ => {
            let (report, _) = acceptance::run_acceptance(seed);
            CommandOutput { report, csv: None }
        }
    };
    out.report.seed = Some(seed);
    Ok(out)
}

/// Writes the CSV table (when requested and produced) and the JSON report
/// (when an output path is set). Returns the JSON text.
pub fn write_artifacts(cfg: &ExperimentConfig, out: &CommandOutput) -> Result<String> {
    let json = out.report.to_json();
    let io = |path: &std::path::Path, e: std::io::Error| Error::config("output", format!("{}: {e}", path.display()));
    if let (Some(path), Some(csv)) = (&cfg.csv, &out.csv) {
        std::fs::write(path, csv).map_err(|e| io(path, e))?;
    }
    if let Some(path) = &cfg.output {
        std::fs::write(path, &json).map_err(|e| io(path, e))?;
    }
    Ok(json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_from_config_text() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "subcommand": "spectrum-scan",
                "measure": {"preset": "atoms", "support": "line", "atoms": [[0, 0.5], [1, 0.5]]},
                "alpha": [[1, 0], [2, 0]]}"#,
        )
        .unwrap();
        let out = run(&cfg).unwrap();
        assert!(out.report.passed);
        assert_eq!(out.csv.unwrap().lines().count(), 5);
    }

    #[test]
    fn config_problems_are_errors() {
        let mut cfg = ExperimentConfig::new("spectrum-scan");
        assert!(matches!(run(&cfg), Err(Error::Config { .. })));
        cfg.subcommand = "nope".into();
        assert!(run(&cfg).is_err());
        let mut cfg = ExperimentConfig::new("dissipative");
        cfg.alpha = vec![[0.0, 1.0], [0.0, 2.0]];
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn same_seed_same_bytes() {
        let mut cfg = ExperimentConfig::new("clark-verify");
        cfg.gamma = Some([0.3, 0.0]);
        cfg.grid = Some(512);
        cfg.seed = Some(9);
        let a = run(&cfg).unwrap().report.to_json();
        let b = run(&cfg).unwrap().report.to_json();
        assert_eq!(a, b);
    }
}
