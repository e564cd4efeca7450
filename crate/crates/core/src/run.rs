//! Executes a [`RunConfig`]: analytic sweep, Monte Carlo experiment or
//! verification suite.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analytic::{general_cross_correlation, sweep, CrossPair};
use crate::config::{ConfigError, Mode, RunConfig, OUT_DIR_ENV};
use crate::mc::run_experiment;
use crate::output::{render_csv, OutputError};
use crate::verify::{verify, Report, VerifyOptions};
use crate::JointSettings;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Model(#[from] crate::Error),

    #[error(transparent)]
    Output(#[from] OutputError),
}

#[derive(Debug)]
pub enum RunOutcome {
    Csv(String),
    Verify(Report),
}

/// Base name of the output file: the preset name, otherwise the mode.
pub fn output_stem(cfg: &RunConfig) -> String {
    match cfg.preset {
        Some(p) => match cfg.mode {
            Mode::MonteCarlo => format!("{}_montecarlo", p.name()),
            _ => p.name().to_string(),
        },
        None => cfg.mode.name().to_string(),
    }
}

/// `--out` if given, otherwise `<dir>/<stem>.csv` under the output
/// directory variable, otherwise `None` (write to stdout).
pub fn output_path(cfg: &RunConfig, out_dir: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = &cfg.out {
        return Some(p.clone());
    }
    out_dir.map(|d| d.join(format!("{}.csv", output_stem(cfg))))
}

pub fn output_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Runs the configured mode. `verify_opts` overrides the verification
/// settings; by default they come from [`VerifyOptions::default`].
pub fn execute(cfg: &RunConfig, verify_opts: Option<VerifyOptions>) -> Result<RunOutcome, RunError> {
    match cfg.mode {
        Mode::Analytic => {
            let records = sweep(&cfg.sweep_spec()?)?;
            Ok(RunOutcome::Csv(render_csv(&records, None)?))
        }
        Mode::MonteCarlo => {
            let records = sweep(&cfg.sweep_spec()?)?;
            let points: Vec<JointSettings> = records.iter().map(|r| r.settings).collect();
            log::info!(
                "simulating {} points, {} bins each, mu = {}",
                points.len(),
                cfg.source.time_bins,
                cfg.source.mean_photon_number
            );
            let exp = run_experiment(&points, &cfg.source, cfg.routing, cfg.normalization)?;
            // Zero coincidences are only suspicious where the model predicts some.
            for p in &exp.points {
                for pair in CrossPair::ALL {
                    let dark = general_cross_correlation(&p.settings, pair) < 1e-12;
                    if p.estimate(pair).zero_coincidences && !dark {
                        log::warn!("no {pair:?} coincidences at phi = {}, psi = {}", p.settings.phi, p.settings.psi);
                    }
                }
            }
            Ok(RunOutcome::Csv(render_csv(&records, Some(&exp))?))
        }
        Mode::Verify => Ok(RunOutcome::Verify(verify(&verify_opts.unwrap_or_default())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn output_naming() {
        let cfg = parse_config(None, &flags(&[("preset", "fig3")]), Some(Mode::Analytic)).unwrap();
        assert_eq!(output_path(&cfg, None), None);
        assert_eq!(output_path(&cfg, Some(Path::new("out"))), Some(PathBuf::from("out/fig3.csv")));
        let cfg = parse_config(None, &flags(&[("preset", "fig2"), ("out", "x.csv")]), Some(Mode::MonteCarlo)).unwrap();
        assert_eq!(output_stem(&cfg), "fig2_montecarlo");
        assert_eq!(output_path(&cfg, Some(Path::new("out"))), Some(PathBuf::from("x.csv")));
    }

    #[test]
    fn montecarlo_run_is_deterministic() {
        let f = flags(&[("sweep.rho", "0:pi:pi/2"), ("fix.zeta", "pi/4"), ("bins", "20000"), ("mu", "0.2")]);
        let cfg = parse_config(None, &f, Some(Mode::MonteCarlo)).unwrap();
        let a = match execute(&cfg, None).unwrap() {
            RunOutcome::Csv(s) => s,
            RunOutcome::Verify(_) => unreachable!(),
        };
        let b = match execute(&cfg, None).unwrap() {
            RunOutcome::Csv(s) => s,
            RunOutcome::Verify(_) => unreachable!(),
        };
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 4);
        assert!(a.lines().next().unwrap().ends_with("n_pairs"));
    }
}
