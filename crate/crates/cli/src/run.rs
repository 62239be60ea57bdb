//! Experiment drivers: run the configured ensemble or a single fixed-Ω
//! trace and emit CSV artifacts.
//!
//! Artifacts per `ensemble` run (inside the output directory):
//!
//! * `ensemble_stats.csv` — knowledge-measure means ± SEs per checkpoint;
//! * `record_XXX.csv` / `filter_trace_XXX.csv` for the first
//!   `trace_records` records — the raw detector output and the filter
//!   readout along it;
//! * `manifest.txt` — the fully resolved configuration (itself a valid
//!   config file) plus version and timing comments.
//!
//! A `trace` run emits `record.csv`, `filter_trace.csv`, and `manifest.txt`
//! for one record at the configured `omega_true`.
//!
//! On any failure every file written so far is removed, so an output
//! directory never holds a partial run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bloch_core::{build_grid, BlochError, BlochState, RabiGrid, SystemParams};
use linear_filter::{run_filter, FilterError, FilterTrace, DEFAULT_EPSILON_GAMMA_UNITS};
use metrics::{
    ensemble_run, info_gain, posterior_variance, record_omega, record_sim_seed, write_stats_csv,
    MetricsError,
};
use trajectory_engine::{
    simulate_record_checkpointed, RecordError, SchemeConfig, SimError, Simulation,
};

use crate::config::{ConfigError, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("filtering failed: {0}")]
    Filter(#[from] FilterError),
    #[error("record file error: {0}")]
    Record(#[from] RecordError),
    #[error("grid error: {0}")]
    Grid(#[from] BlochError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 at runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// Files created by one run; on failure they are all removed.
struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn create(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    /// Registers `name` as an artifact and returns its full path.
    fn file(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        path
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.file(name);
        fs::write(&path, contents).map_err(|source| RunError::Io { path, source })
    }

    fn discard_all(&self) {
        for path in &self.written {
            let _ = fs::remove_file(path);
        }
    }
}

/// Runs the configured ensemble and writes its artifacts into `out_dir`.
/// Returns the paths written.
pub fn run_ensemble(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let start = Instant::now();
    let mut artifacts = Artifacts::create(out_dir)?;
    let result = ensemble_inner(config, &mut artifacts)
        .and_then(|()| write_manifest(config, &mut artifacts, "ensemble", start));
    match result {
        Ok(()) => Ok(artifacts.written),
        Err(e) => {
            artifacts.discard_all();
            Err(e)
        }
    }
}

fn ensemble_inner(config: &ExperimentConfig, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let params = SystemParams::new(config.gamma, config.omega_max)?;
    let scheme = SchemeConfig::new(config.scheme);
    let stats = ensemble_run(
        &scheme,
        &params,
        config.policy,
        config.n_records,
        config.duration,
        config.dt,
        config.grid_points,
        config.checkpoint_steps(),
        config.seed,
    )?;
    write_stats_csv(&stats, &artifacts.file("ensemble_stats.csv"))?;

    // Re-derive the first few records exactly as the ensemble ran them and
    // dump their raw detector output and filter readout.
    let grid = build_grid(&params, config.grid_points)?;
    for index in 0..config.trace_records.min(config.n_records) {
        let omega_true = record_omega(&params, config.seed, index);
        let seed = record_sim_seed(config.seed, index);
        let initial = config.policy.initial_state(omega_true, &params);
        let sim = simulate_record_checkpointed(
            omega_true,
            initial,
            &scheme,
            &params,
            config.duration,
            config.dt,
            seed,
            config.checkpoint_steps(),
        )?;
        let (_, trace) = run_filter(
            &sim.record,
            &grid,
            &params,
            DEFAULT_EPSILON_GAMMA_UNITS * params.gamma,
            config.policy,
            config.checkpoint_steps(),
        )?;
        sim.record.write_csv(&artifacts.file(&format!("record_{index:03}.csv")))?;
        let name = format!("filter_trace_{index:03}.csv");
        artifacts.write(&name, &trace_csv(&sim, &trace, &grid))?;
    }
    Ok(())
}

/// Runs one record at the configured fixed `omega_true` and writes the
/// record, the filter trace, and a manifest into `out_dir`.
pub fn run_trace(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let start = Instant::now();
    let mut artifacts = Artifacts::create(out_dir)?;
    let result = trace_inner(config, &mut artifacts)
        .and_then(|()| write_manifest(config, &mut artifacts, "trace", start));
    match result {
        Ok(()) => Ok(artifacts.written),
        Err(e) => {
            artifacts.discard_all();
            Err(e)
        }
    }
}

fn trace_inner(config: &ExperimentConfig, artifacts: &mut Artifacts) -> Result<(), RunError> {
    let params = SystemParams::new(config.gamma, config.omega_max)?;
    let scheme = SchemeConfig::new(config.scheme);
    let initial = config.policy.initial_state(config.omega_true, &params);
    let sim = simulate_record_checkpointed(
        config.omega_true,
        initial,
        &scheme,
        &params,
        config.duration,
        config.dt,
        config.seed,
        config.checkpoint_steps(),
    )?;
    let grid = build_grid(&params, config.grid_points)?;
    let (_, trace) = run_filter(
        &sim.record,
        &grid,
        &params,
        DEFAULT_EPSILON_GAMMA_UNITS * params.gamma,
        config.policy,
        config.checkpoint_steps(),
    )?;
    sim.record.write_csv(&artifacts.file("record.csv"))?;
    artifacts.write("filter_trace.csv", &trace_csv(&sim, &trace, &grid))?;
    Ok(())
}

/// Renders the side-by-side trace: the known-Ω conditioned trajectory, the
/// best-estimate state with its purity, the scalar knowledge measures, and
/// the full posterior, one checkpoint per row.
fn trace_csv(sim: &Simulation, trace: &FilterTrace, grid: &RabiGrid) -> String {
    debug_assert_eq!(sim.checkpoints.len(), trace.len());
    let mut out = String::new();
    out.push_str("time,true_x,true_y,true_z,best_x,best_y,best_z,purity,variance,info_gain");
    for j in 0..grid.len() {
        let _ = write!(out, ",w_{j:03}");
    }
    out.push('\n');
    for (k, (time, truth)) in sim.checkpoints.iter().enumerate() {
        let best: BlochState = trace.best_estimates[k];
        let post = &trace.posteriors[k];
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            time,
            truth.x,
            truth.y,
            truth.z,
            best.x,
            best.y,
            best.z,
            best.purity(),
            posterior_variance(post),
            info_gain(post, grid),
        );
        for w in &post.weights {
            let _ = write!(out, ",{w}");
        }
        out.push('\n');
    }
    out
}

fn write_manifest(
    config: &ExperimentConfig,
    artifacts: &mut Artifacts,
    command: &str,
    start: Instant,
) -> Result<(), RunError> {
    let mut text = String::new();
    let _ = writeln!(text, "# {command} run manifest; this file is itself a valid config");
    let _ = writeln!(text, "# version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "# wall_time_s = {:.3}", start.elapsed().as_secs_f64());
    text.push_str(&config.to_config_string());
    artifacts.write("manifest.txt", &text)
}
