//! Flat `key = value` experiment configuration.
//!
//! One scalar per line, `#` lines are comments, unknown or duplicate keys
//! are errors. [`ExperimentConfig::to_config_string`] emits every key with
//! shortest-round-trip float formatting, so serializing and re-parsing
//! reproduces the configuration exactly — a written manifest is itself a
//! valid config file.

use std::path::PathBuf;

use bloch_core::InitPolicy;
use trajectory_engine::{SchemeKind, MAX_DT_GAMMA_UNITS};

/// Everything a run needs, in units of γ (rates) and 1/γ (times).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    pub gamma: f64,
    pub omega_max: f64,
    pub dt: f64,
    pub duration: f64,
    pub n_records: usize,
    pub grid_points: usize,
    pub policy: InitPolicy,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Time between knowledge-measure snapshots (units of 1/γ).
    pub checkpoint_interval: f64,
    /// How many leading records also dump full per-record artifacts.
    pub trace_records: usize,
    /// The fixed Ω used by the `trace` subcommand (units of γ).
    pub omega_true: f64,
}

impl ExperimentConfig {
    /// Defaults for everything except the scheme, which has no natural
    /// default and must come from the config file.
    pub fn with_scheme(scheme: SchemeKind) -> Self {
        ExperimentConfig {
            scheme,
            gamma: 1.0,
            omega_max: 10.0,
            dt: 1e-3,
            duration: 50.0,
            n_records: 250,
            grid_points: 201,
            policy: InitPolicy::Steady,
            seed: 0,
            out_dir: None,
            checkpoint_interval: 0.1,
            trace_records: 2,
            omega_true: 5.0,
        }
    }

    /// Steps per run, after [`Self::validate`] has confirmed integrality.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Steps between checkpoints, after validation.
    pub fn checkpoint_steps(&self) -> usize {
        (self.checkpoint_interval / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.omega_max > 0.0 && self.omega_max.is_finite()) {
            return bad(format!("omega_max must be positive, got {}", self.omega_max));
        }
        let max_dt = MAX_DT_GAMMA_UNITS / self.gamma;
        if !(self.dt > 0.0 && self.dt <= max_dt) {
            return bad(format!("dt must lie in (0, {max_dt}], got {}", self.dt));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !is_integral(self.duration, self.dt) {
            return bad(format!(
                "duration {} is not a whole number of dt = {} steps",
                self.duration, self.dt
            ));
        }
        if self.checkpoint_interval.is_nan()
            || self.checkpoint_interval <= 0.0
            || !is_integral(self.checkpoint_interval, self.dt)
        {
            return bad(format!(
                "checkpoint_interval {} must be a positive whole number of dt = {} steps",
                self.checkpoint_interval, self.dt
            ));
        }
        if self.n_records < 2 {
            return bad(format!("n_records must be at least 2, got {}", self.n_records));
        }
        if self.grid_points < 3 || self.grid_points % 2 == 0 {
            return bad(format!("grid_points must be odd and at least 3, got {}", self.grid_points));
        }
        if !(self.omega_true.is_finite() && self.omega_true.abs() <= self.omega_max) {
            return bad(format!(
                "omega_true {} must lie within ±omega_max = {}",
                self.omega_true, self.omega_max
            ));
        }
        Ok(())
    }

    /// Serializes every key; parsing the result reproduces `self` exactly.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scheme = {}\n", self.scheme));
        out.push_str(&format!("gamma = {}\n", self.gamma));
        out.push_str(&format!("omega_max = {}\n", self.omega_max));
        out.push_str(&format!("dt = {}\n", self.dt));
        out.push_str(&format!("duration = {}\n", self.duration));
        out.push_str(&format!("n_records = {}\n", self.n_records));
        out.push_str(&format!("grid_points = {}\n", self.grid_points));
        out.push_str(&format!("policy = {}\n", self.policy));
        out.push_str(&format!("seed = {}\n", self.seed));
        if let Some(dir) = &self.out_dir {
            out.push_str(&format!("out_dir = {}\n", dir.display()));
        }
        out.push_str(&format!("checkpoint_interval = {}\n", self.checkpoint_interval));
        out.push_str(&format!("trace_records = {}\n", self.trace_records));
        out.push_str(&format!("omega_true = {}\n", self.omega_true));
        out
    }
}

fn is_integral(span: f64, dt: f64) -> bool {
    let steps = (span / dt).round();
    steps >= 1.0 && (steps * dt - span).abs() <= 1e-6 * dt
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("config is missing required key `scheme`")]
    MissingScheme,
    #[error("bad config: {0}")]
    Invalid(String),
}

/// Parses the flat config format and validates the result.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut scheme = None;
    let mut gamma = None;
    let mut omega_max = None;
    let mut dt = None;
    let mut duration = None;
    let mut n_records = None;
    let mut grid_points = None;
    let mut policy = None;
    let mut seed = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut checkpoint_interval = None;
    let mut trace_records = None;
    let mut omega_true = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let err = |msg: String| ConfigError::Line { line: lineno, msg };
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(format!("expected `key = value`, got {line:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("key `{key}` has no value")));
        }

        fn set<T>(
            slot: &mut Option<T>,
            value: T,
            key: &str,
            err: impl Fn(String) -> ConfigError,
        ) -> Result<(), ConfigError> {
            if slot.is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
            *slot = Some(value);
            Ok(())
        }
        macro_rules! parse_into {
            ($slot:ident, $ty:ty) => {{
                let parsed: $ty = value
                    .parse()
                    .map_err(|e| err(format!("bad value for `{key}`: {e}")))?;
                set(&mut $slot, parsed, key, err)?;
            }};
        }

        match key {
            "scheme" => parse_into!(scheme, SchemeKind),
            "gamma" => parse_into!(gamma, f64),
            "omega_max" => parse_into!(omega_max, f64),
            "dt" => parse_into!(dt, f64),
            "duration" => parse_into!(duration, f64),
            "n_records" => parse_into!(n_records, usize),
            "grid_points" => parse_into!(grid_points, usize),
            "policy" => parse_into!(policy, InitPolicy),
            "seed" => parse_into!(seed, u64),
            "out_dir" => set(&mut out_dir, PathBuf::from(value), key, err)?,
            "checkpoint_interval" => parse_into!(checkpoint_interval, f64),
            "trace_records" => parse_into!(trace_records, usize),
            "omega_true" => parse_into!(omega_true, f64),
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }

    let mut config = ExperimentConfig::with_scheme(scheme.ok_or(ConfigError::MissingScheme)?);
    if let Some(v) = gamma {
        config.gamma = v;
    }
    if let Some(v) = omega_max {
        config.omega_max = v;
    }
    if let Some(v) = dt {
        config.dt = v;
    }
    if let Some(v) = duration {
        config.duration = v;
    }
    if let Some(v) = n_records {
        config.n_records = v;
    }
    if let Some(v) = grid_points {
        config.grid_points = v;
    }
    if let Some(v) = policy {
        config.policy = v;
    }
    if let Some(v) = seed {
        config.seed = v;
    }
    config.out_dir = out_dir;
    if let Some(v) = checkpoint_interval {
        config.checkpoint_interval = v;
    }
    if let Some(v) = trace_records {
        config.trace_records = v;
    }
    if let Some(v) = omega_true {
        config.omega_true = v;
    }
    config.validate()?;
    Ok(config)
}

/// Reads and parses a config file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
