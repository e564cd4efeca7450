//! Run configuration: flat `key = value` files plus command-line overrides.
//!
//! ```text
//! # synchronized scan, Monte Carlo
//! mode = montecarlo
//! sweep.rho = 0:7pi/4:pi/4
//! fix.zeta = pi/4
//! mu = 0.05
//! bins = 90000000
//! ```
//!
//! Angle values accept plain numbers or multiples of `pi` (`pi/4`, `-3pi/4`,
//! `2*pi`). With `degrees = true` every angle is read in degrees. Angles are
//! always stored in radians.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::analytic::{Preset, SweepParam};
use crate::mc::{NormalizationMode, PairRouting, SourceParams};
use crate::{Axis, JointSettings, SweepSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },

    #[error("preset `{preset}` and explicit sweep `{param}` are mutually exclusive")]
    ConflictingPresetSweep { preset: String, param: String },

    #[error("step of sweep `{0}` must be positive")]
    NonPositiveStep(String),

    #[error("sweep `{0}` needs start < stop")]
    EmptyRange(String),

    #[error("`{0}` overlaps another swept or fixed parameter")]
    Overlap(String),

    #[error("no run mode given (analytic, montecarlo or verify)")]
    MissingMode,

    #[error("mode `{0}` needs a preset or at least one sweep")]
    MissingSweep(String),
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    MonteCarlo,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::MonteCarlo => "montecarlo",
            Mode::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Mode::Analytic),
            "montecarlo" => Some(Mode::MonteCarlo),
            "verify" => Some(Mode::Verify),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub preset: Option<Preset>,
    /// Explicit sweep axes in declaration order, radians.
    pub sweeps: Vec<(SweepParam, Axis)>,
    /// Fixed settings in declaration order, radians.
    pub fixed: Vec<(SweepParam, f64)>,
    pub i0: f64,
    pub source: SourceParams,
    pub routing: PairRouting,
    pub normalization: NormalizationMode,
    pub out: Option<PathBuf>,
    pub gnuplot: bool,
}

pub const DEFAULT_MU: f64 = 0.05;
pub const DEFAULT_BINS: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 20220223;
pub const DEFAULT_STREAMS: usize = 4;

/// Environment variable naming the directory for output files when `--out`
/// is not given.
pub const OUT_DIR_ENV: &str = "NMZI_OUT_DIR";

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            preset: None,
            sweeps: Vec::new(),
            fixed: Vec::new(),
            i0: 1.0,
            source: SourceParams {
                mean_photon_number: DEFAULT_MU,
                time_bins: DEFAULT_BINS,
                seed: DEFAULT_SEED,
                streams: DEFAULT_STREAMS,
            },
            routing: PairRouting::default(),
            normalization: NormalizationMode::default(),
            out: None,
            gnuplot: false,
        }
    }

    /// Axes of the run: the preset's or the explicit ones.
    pub fn axes(&self) -> Vec<(SweepParam, Axis)> {
        match self.preset {
            Some(p) => p.axes(),
            None => self.sweeps.clone(),
        }
    }

    pub fn sweep_spec(&self) -> crate::Result<SweepSpec> {
        let mut base = JointSettings::new(0.0, 0.0, 0.0, 0.0).with_i0(self.i0);
        if let Some(p) = self.preset {
            for (param, v) in p.fixed::<f64>() {
                param.apply(&mut base, v);
            }
        }
        for &(param, v) in &self.fixed {
            param.apply(&mut base, v);
        }
        let mut spec = SweepSpec::new(base);
        for (param, axis) in self.axes() {
            spec.push_axis(param, axis)?;
        }
        Ok(spec)
    }

    /// Canonical text form; [`parse_config`] on it reproduces `self`.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode = {}", self.mode.name());
        if let Some(p) = self.preset {
            let _ = writeln!(s, "preset = {}", p.name());
        }
        for (param, a) in &self.sweeps {
            let _ = writeln!(s, "sweep.{param} = {}:{}:{}", a.start, a.stop, a.step);
        }
        for (param, v) in &self.fixed {
            let _ = writeln!(s, "fix.{param} = {v}");
        }
        let _ = writeln!(s, "i0 = {}", self.i0);
        let _ = writeln!(s, "mu = {}", self.source.mean_photon_number);
        let _ = writeln!(s, "bins = {}", self.source.time_bins);
        let _ = writeln!(s, "seed = {}", self.source.seed);
        let _ = writeln!(s, "streams = {}", self.source.streams);
        let _ = writeln!(s, "routing = {}", self.routing.name());
        let _ = writeln!(s, "normalization = {}", self.normalization.name());
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "gnuplot = {}", self.gnuplot);
        s
    }
}

/// Splits a config file into `(key, value)` entries. Blank lines and `#`
/// comments are skipped.
pub fn parse_entries(text: &str) -> ConfigResult<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: n + 1,
            text: raw.trim().to_string(),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: n + 1,
                text: raw.trim().to_string(),
            });
        }
        entries.push((k.to_string(), v.to_string()));
    }
    Ok(entries)
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_bool(key: &str, value: &str) -> ConfigResult<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(invalid(key, value, "expected true or false")),
    }
}

fn parse_num<N: std::str::FromStr>(key: &str, value: &str) -> ConfigResult<N> {
    value.parse().map_err(|_| invalid(key, value, "not a number"))
}

/// Parses a plain number or a multiple of pi: `pi`, `-pi/4`, `3pi/4`, `2*pi`, `0.5pi`.
pub fn parse_angle_value(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(x) = t.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t),
    };
    let idx = body.find("pi")?;
    let coef = body[..idx].trim().trim_end_matches('*').trim();
    let rest = body[idx + 2..].trim();
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
    let denom = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')?.trim().parse::<f64>().ok()?
    };
    if denom == 0.0 {
        return None;
    }
    let v = coef * std::f64::consts::PI / denom;
    let v = if neg { -v } else { v };
    v.is_finite().then_some(v)
}

fn parse_param(key: &str, name: &str) -> ConfigResult<SweepParam> {
    name.parse::<SweepParam>()
        .map_err(|_| ConfigError::UnknownKey(key.to_string()))
}

/// Builds a validated [`RunConfig`] from file entries followed by flag
/// entries; later entries override earlier ones. `mode` is used when no
/// `mode` entry is present.
pub fn parse_config(
    file_text: Option<&str>,
    flags: &[(String, String)],
    mode: Option<Mode>,
) -> ConfigResult<RunConfig> {
    let mut entries = match file_text {
        Some(t) => parse_entries(t)?,
        None => Vec::new(),
    };
    entries.extend(flags.iter().cloned());
    build(&entries, mode)
}

fn build(entries: &[(String, String)], mode: Option<Mode>) -> ConfigResult<RunConfig> {
    // The unit flag governs all angle values regardless of where it appears.
    let mut degrees = false;
    for (k, v) in entries {
        if k == "degrees" {
            degrees = parse_bool(k, v)?;
        }
    }
    let to_rad = |key: &str, v: &str| -> ConfigResult<f64> {
        let x = parse_angle_value(v).ok_or_else(|| invalid(key, v, "not an angle"))?;
        Ok(if degrees { x.to_radians() } else { x })
    };

    let mut cfg = RunConfig::new(mode.unwrap_or(Mode::Analytic));
    let mut mode_seen = mode.is_some();
    for (key, value) in entries {
        let (k, v) = (key.as_str(), value.as_str());
        if let Some(name) = k.strip_prefix("sweep.") {
            let param = parse_param(k, name)?;
            let parts: Vec<&str> = v.split(':').collect();
            if parts.len() != 3 {
                return Err(invalid(k, v, "expected start:stop:step"));
            }
            let axis = Axis::new(to_rad(k, parts[0])?, to_rad(k, parts[1])?, to_rad(k, parts[2])?);
            if axis.step <= 0.0 {
                return Err(ConfigError::NonPositiveStep(param.name().to_string()));
            }
            if axis.start >= axis.stop {
                return Err(ConfigError::EmptyRange(param.name().to_string()));
            }
            match cfg.sweeps.iter_mut().find(|(p, _)| *p == param) {
                Some(slot) => slot.1 = axis,
                None => cfg.sweeps.push((param, axis)),
            }
            continue;
        }
        if let Some(name) = k.strip_prefix("fix.") {
            let param = parse_param(k, name)?;
            let x = to_rad(k, v)?;
            match cfg.fixed.iter_mut().find(|(p, _)| *p == param) {
                Some(slot) => slot.1 = x,
                None => cfg.fixed.push((param, x)),
            }
            continue;
        }
        match k {
            "mode" => {
                if mode.is_none() {
                    cfg.mode = Mode::parse(v).ok_or_else(|| invalid(k, v, "expected analytic, montecarlo or verify"))?;
                    mode_seen = true;
                }
            }
            "preset" => {
                cfg.preset = Some(v.parse().map_err(|_| invalid(k, v, "expected fig2, fig3 or fig4"))?);
            }
            "i0" => {
                let x: f64 = parse_num(k, v)?;
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(invalid(k, v, "must be non-negative"));
                }
                cfg.i0 = x;
            }
            "mu" => {
                let x: f64 = parse_num(k, v)?;
                if !(x > 0.0 && x.is_finite()) {
                    return Err(invalid(k, v, "must be positive"));
                }
                cfg.source.mean_photon_number = x;
            }
            "bins" => {
                let n: u64 = parse_num(k, v)?;
                if n == 0 {
                    return Err(invalid(k, v, "must be positive"));
                }
                cfg.source.time_bins = n;
            }
            "seed" => cfg.source.seed = parse_num(k, v)?,
            "streams" => {
                let n: usize = parse_num(k, v)?;
                if n == 0 {
                    return Err(invalid(k, v, "must be positive"));
                }
                cfg.source.streams = n;
            }
            "routing" => {
                cfg.routing = PairRouting::parse(v).ok_or_else(|| invalid(k, v, "expected one-per-station or binomial"))?;
            }
            "normalization" => {
                cfg.normalization = NormalizationMode::parse(v).ok_or_else(|| invalid(k, v, "expected analytic or measured"))?;
            }
            "out" => cfg.out = Some(PathBuf::from(v)),
            "gnuplot" => cfg.gnuplot = parse_bool(k, v)?,
            "degrees" => {}
            _ => return Err(ConfigError::UnknownKey(k.to_string())),
        }
    }
    if !mode_seen {
        return Err(ConfigError::MissingMode);
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> ConfigResult<()> {
    if let (Some(preset), Some((param, _))) = (cfg.preset, cfg.sweeps.first()) {
        return Err(ConfigError::ConflictingPresetSweep {
            preset: preset.name().to_string(),
            param: param.name().to_string(),
        });
    }
    let axes = cfg.axes();
    if cfg.mode != Mode::Verify && axes.is_empty() {
        return Err(ConfigError::MissingSweep(cfg.mode.name().to_string()));
    }
    for (i, (p, _)) in axes.iter().enumerate() {
        if axes[..i].iter().any(|(q, _)| q.overlaps(*p)) {
            return Err(ConfigError::Overlap(p.name().to_string()));
        }
        if cfg.fixed.iter().any(|(q, _)| q.overlaps(*p)) {
            return Err(ConfigError::Overlap(p.name().to_string()));
        }
    }
    for (i, (p, _)) in cfg.fixed.iter().enumerate() {
        if cfg.fixed[..i].iter().any(|(q, _)| q.overlaps(*p)) {
            return Err(ConfigError::Overlap(p.name().to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn fig2_preset() {
        let cfg = parse_config(None, &flags(&[("preset", "fig2")]), Some(Mode::Analytic)).unwrap();
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.axes.len(), 1);
        let (param, axis) = spec.axes[0];
        assert_eq!(param, SweepParam::Rho);
        assert_eq!((axis.start, axis.stop, axis.step), (0.0, 2.0 * PI, PI / 100.0));
        assert_eq!(spec.base.xi, FRAC_PI_4);
        assert_eq!(spec.base.theta, FRAC_PI_4);
    }

    #[test]
    fn fig4_preset() {
        let cfg = parse_config(None, &flags(&[("preset", "fig4")]), Some(Mode::Analytic)).unwrap();
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.base.psi, 0.0);
        assert_eq!(spec.base.theta, FRAC_PI_4);
        let params: Vec<_> = spec.axes.iter().map(|(p, _)| *p).collect();
        assert_eq!(params, vec![SweepParam::Phi, SweepParam::Xi]);
    }

    #[test]
    fn zero_step_names_the_axis() {
        let err = parse_config(None, &flags(&[("sweep.phi", "0:1:0")]), Some(Mode::Analytic)).unwrap_err();
        assert_eq!(err, ConfigError::NonPositiveStep("phi".into()));
        assert!(err.to_string().contains("step"));
        assert!(err.to_string().contains("phi"));
    }

    #[test]
    fn distinct_errors() {
        let unknown = parse_config(Some("colour = red"), &[], Some(Mode::Analytic)).unwrap_err();
        assert_eq!(unknown, ConfigError::UnknownKey("colour".into()));
        let unknown_param = parse_config(None, &flags(&[("sweep.omega", "0:1:0.1")]), Some(Mode::Analytic)).unwrap_err();
        assert_eq!(unknown_param, ConfigError::UnknownKey("sweep.omega".into()));
        let conflict = parse_config(
            Some("preset = fig3"),
            &flags(&[("sweep.phi", "0:1:0.1")]),
            Some(Mode::Analytic),
        )
        .unwrap_err();
        assert!(matches!(conflict, ConfigError::ConflictingPresetSweep { .. }));
        let syntax = parse_config(Some("mode analytic"), &[], None).unwrap_err();
        assert!(matches!(syntax, ConfigError::Syntax { line: 1, .. }));
        let range = parse_config(None, &flags(&[("sweep.xi", "1:0:0.1")]), Some(Mode::Analytic)).unwrap_err();
        assert_eq!(range, ConfigError::EmptyRange("xi".into()));
        let overlap = parse_config(
            None,
            &flags(&[("sweep.rho", "0:1:0.1"), ("fix.psi", "0")]),
            Some(Mode::Analytic),
        )
        .unwrap_err();
        assert_eq!(overlap, ConfigError::Overlap("rho".into()));
        assert_eq!(parse_config(None, &[], None).unwrap_err(), ConfigError::MissingMode);
        assert!(matches!(
            parse_config(None, &[], Some(Mode::MonteCarlo)).unwrap_err(),
            ConfigError::MissingSweep(_)
        ));
        assert!(parse_config(None, &[], Some(Mode::Verify)).is_ok());
    }

    #[test]
    fn flags_override_file() {
        let file = "mode = montecarlo\nsweep.rho = 0:1:0.5  # coarse\nmu = 0.1\nseed = 3\n";
        let cfg = parse_config(Some(file), &flags(&[("mu", "0.2"), ("sweep.rho", "0:2:0.5")]), None).unwrap();
        assert_eq!(cfg.mode, Mode::MonteCarlo);
        assert_eq!(cfg.source.mean_photon_number, 0.2);
        assert_eq!(cfg.source.seed, 3);
        assert_eq!(cfg.sweeps, vec![(SweepParam::Rho, Axis::new(0.0, 2.0, 0.5))]);
        // subcommand wins over the file's mode
        let cfg = parse_config(Some(file), &[], Some(Mode::Analytic)).unwrap();
        assert_eq!(cfg.mode, Mode::Analytic);
    }

    #[test]
    fn degrees_only_change_parsing() {
        let deg = parse_config(
            None,
            &flags(&[("fix.zeta", "45"), ("sweep.rho", "0:360:90"), ("degrees", "true")]),
            Some(Mode::Analytic),
        )
        .unwrap();
        let rad = parse_config(
            None,
            &flags(&[("fix.zeta", "pi/4"), ("sweep.rho", "0:2pi:pi/2")]),
            Some(Mode::Analytic),
        )
        .unwrap();
        assert!((deg.fixed[0].1 - FRAC_PI_4).abs() < 1e-15);
        assert!((deg.sweeps[0].1.stop - rad.sweeps[0].1.stop).abs() < 1e-15);
        assert!((deg.sweeps[0].1.step - rad.sweeps[0].1.step).abs() < 1e-15);
    }

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_angle_value("pi"), Some(PI));
        assert_eq!(parse_angle_value("-pi/4"), Some(-FRAC_PI_4));
        assert_eq!(parse_angle_value("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_angle_value("2*pi"), Some(2.0 * PI));
        assert_eq!(parse_angle_value("0.25"), Some(0.25));
        assert_eq!(parse_angle_value("pi/0"), None);
        assert_eq!(parse_angle_value("tau"), None);
        assert_eq!(parse_angle_value("inf"), None);
    }

    #[test]
    fn canonical_form_round_trips_presets() {
        let cfg = parse_config(
            None,
            &flags(&[("preset", "fig3"), ("fix.xi", "-pi/4"), ("out", "/tmp/x.csv"), ("gnuplot", "true")]),
            Some(Mode::MonteCarlo),
        )
        .unwrap();
        let again = parse_config(Some(&cfg.to_canonical()), &[], None).unwrap();
        assert_eq!(cfg, again);
    }

    fn axis() -> impl Strategy<Value = (SweepParam, Axis)> {
        (0usize..6, -10.0f64..10.0, 0.001f64..10.0, 0.001f64..1.0).prop_map(|(p, start, span, step)| {
            (SweepParam::ALL[p], Axis::new(start, start + span, step))
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(
            axes in proptest::collection::vec(axis(), 1..3),
            mu in 1e-4f64..1.0,
            bins in 1u64..u64::MAX,
            seed in any::<u64>(),
            streams in 1usize..64,
            i0 in 0.0f64..10.0,
            fixed in -10.0f64..10.0,
        ) {
            let mut cfg = RunConfig::new(Mode::MonteCarlo);
            for (p, a) in axes {
                if cfg.sweeps.iter().all(|(q, _)| !q.overlaps(p)) {
                    cfg.sweeps.push((p, a));
                }
            }
            let free = SweepParam::ALL.into_iter().find(|p| cfg.sweeps.iter().all(|(q, _)| !q.overlaps(*p)));
            if let Some(p) = free {
                cfg.fixed.push((p, fixed));
            }
            cfg.i0 = i0;
            cfg.source = SourceParams { mean_photon_number: mu, time_bins: bins, seed, streams };
            cfg.routing = PairRouting::Binomial;
            let parsed = parse_config(Some(&cfg.to_canonical()), &[], None).unwrap();
            prop_assert_eq!(parsed, cfg);
        }
    }
}
