//! Ensemble averaging over independently seeded records.
//!
//! Each record draws its own true Ω from the prior, simulates a detector
//! record, filters it, and reads out purity / variance / information gain
//! at every checkpoint. Records are independent, so they run in parallel;
//! determinism is preserved by deriving every RNG stream from
//! `(master seed, record index)` and by aggregating in record-index order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bloch_core::{build_grid, sample_prior, InitPolicy, SystemParams};
use linear_filter::{run_filter, DEFAULT_EPSILON_GAMMA_UNITS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use trajectory_engine::{record_seed, simulate_record, SchemeConfig};

use crate::{info_gain, posterior_variance, MetricsError};

/// Ensemble means and standard errors of the three knowledge measures,
/// per checkpoint time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    /// Checkpoint times (units of 1/γ), starting at 0.
    pub times: Vec<f64>,
    /// Mean purity of the best-estimate state.
    pub mean_purity: Vec<f64>,
    pub se_purity: Vec<f64>,
    /// Mean posterior variance of Ω (units of γ²).
    pub mean_variance: Vec<f64>,
    pub se_variance: Vec<f64>,
    /// Mean information gain (bits).
    pub mean_info_gain: Vec<f64>,
    pub se_info_gain: Vec<f64>,
    /// Number of records averaged.
    pub n_records: usize,
}

/// The true Ω used by record `index` of an ensemble: one draw from the
/// prior on a dedicated RNG stream.
pub fn record_omega(params: &SystemParams, master_seed: u64, index: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(record_seed(master_seed, 2 * index as u64));
    sample_prior(params, &mut rng)
}

/// The simulation seed used by record `index` of an ensemble.
pub fn record_sim_seed(master_seed: u64, index: usize) -> u64 {
    record_seed(master_seed, 2 * index as u64 + 1)
}

/// One record's knowledge measures at its checkpoint times.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSeries {
    /// Checkpoint times (units of 1/γ), starting at 0.
    pub times: Vec<f64>,
    /// Purity of the best-estimate state.
    pub purity: Vec<f64>,
    /// Posterior variance of Ω (units of γ²).
    pub variance: Vec<f64>,
    /// Information gain over the prior (bits).
    pub info_gain: Vec<f64>,
    /// The true Ω this record was generated with (drawn from the prior).
    pub omega_true: f64,
}

/// Runs record `index` of the ensemble identified by `master_seed` and
/// returns its knowledge-measure time series.
///
/// [`ensemble_run`] is exactly an average of these over
/// `index ∈ 0..n_records`; exposing single records lets callers form
/// per-record statistics (paired differences, symmetry checks) under the
/// identical seeding protocol.
#[allow(clippy::too_many_arguments)]
pub fn record_series(
    scheme: &SchemeConfig,
    params: &SystemParams,
    policy: InitPolicy,
    index: usize,
    duration: f64,
    dt: f64,
    grid_points: usize,
    checkpoint_every: usize,
    master_seed: u64,
) -> Result<RecordSeries, MetricsError> {
    let grid = build_grid(params, grid_points)?;
    let epsilon = DEFAULT_EPSILON_GAMMA_UNITS * params.gamma;
    let omega_true = record_omega(params, master_seed, index);
    let seed = record_sim_seed(master_seed, index);
    let initial = policy.initial_state(omega_true, params);
    let record = simulate_record(omega_true, initial, scheme, params, duration, dt, seed)
        .map_err(|source| MetricsError::Record { index, seed, source })?;
    let (_, trace) = run_filter(&record, &grid, params, epsilon, policy, checkpoint_every)
        .map_err(|source| MetricsError::Filter { index, seed, source })?;

    let purity = trace.best_estimates.iter().map(|v| v.purity()).collect();
    let variance = trace.posteriors.iter().map(posterior_variance).collect();
    let info_gain = trace.posteriors.iter().map(|p| info_gain(p, &grid)).collect();
    Ok(RecordSeries { times: trace.times, purity, variance, info_gain, omega_true })
}

/// Simulates, filters, and summarizes `n_records` independent records.
///
/// Per record: Ω_true is drawn from the prior ([`record_omega`]), the
/// initial state follows `policy` at that Ω_true, and the filter runs over
/// the full record with snapshots every `checkpoint_every` steps (`0` =
/// endpoints only). The output is bit-reproducible from `master_seed` and
/// independent of how many threads execute the records.
#[allow(clippy::too_many_arguments)]
pub fn ensemble_run(
    scheme: &SchemeConfig,
    params: &SystemParams,
    policy: InitPolicy,
    n_records: usize,
    duration: f64,
    dt: f64,
    grid_points: usize,
    checkpoint_every: usize,
    master_seed: u64,
) -> Result<EnsembleStats, MetricsError> {
    if n_records < 2 {
        return Err(MetricsError::TooFewRecords(n_records));
    }

    let run_one = |index: usize| -> Result<RecordSeries, MetricsError> {
        record_series(
            scheme,
            params,
            policy,
            index,
            duration,
            dt,
            grid_points,
            checkpoint_every,
            master_seed,
        )
    };

    // Parallel map, then a sequential index-ordered pass: the first error in
    // index order is reported, and the reduction never depends on which
    // worker finished first.
    let outcomes: Vec<Result<RecordSeries, MetricsError>> =
        (0..n_records).into_par_iter().map(run_one).collect();
    let mut series = Vec::with_capacity(n_records);
    for outcome in outcomes {
        series.push(outcome?);
    }

    let times = series[0].times.clone();
    let n_checkpoints = times.len();
    let mut stats = EnsembleStats {
        times,
        mean_purity: Vec::with_capacity(n_checkpoints),
        se_purity: Vec::with_capacity(n_checkpoints),
        mean_variance: Vec::with_capacity(n_checkpoints),
        se_variance: Vec::with_capacity(n_checkpoints),
        mean_info_gain: Vec::with_capacity(n_checkpoints),
        se_info_gain: Vec::with_capacity(n_checkpoints),
        n_records,
    };
    for k in 0..n_checkpoints {
        let (m, se) = column_stats(|i| series[i].purity[k], n_records);
        stats.mean_purity.push(m);
        stats.se_purity.push(se);
        let (m, se) = column_stats(|i| series[i].variance[k], n_records);
        stats.mean_variance.push(m);
        stats.se_variance.push(se);
        let (m, se) = column_stats(|i| series[i].info_gain[k], n_records);
        stats.mean_info_gain.push(m);
        stats.se_info_gain.push(se);
    }
    Ok(stats)
}

/// Mean and standard error (sample std / √n) of one checkpoint column.
fn column_stats(value: impl Fn(usize) -> f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = (0..n).map(&value).sum::<f64>() / nf;
    let ss: f64 = (0..n)
        .map(|i| {
            let d = value(i) - mean;
            d * d
        })
        .sum();
    (mean, (ss / (nf - 1.0)).sqrt() / nf.sqrt())
}

const STATS_HEADER: &str = "time,p_mean,p_se,V_mean,V_se,dI_mean,dI_se,n";

/// Writes the stats as CSV with columns
/// `time,p_mean,p_se,V_mean,V_se,dI_mean,dI_se,n`. Floats use shortest
/// round-trip formatting, so a write/read cycle is bit-exact.
pub fn write_stats_csv(stats: &EnsembleStats, path: &Path) -> Result<(), MetricsError> {
    let mut out = String::with_capacity(64 * (stats.times.len() + 1));
    out.push_str(STATS_HEADER);
    out.push('\n');
    for k in 0..stats.times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            stats.times[k],
            stats.mean_purity[k],
            stats.se_purity[k],
            stats.mean_variance[k],
            stats.se_variance[k],
            stats.mean_info_gain[k],
            stats.se_info_gain[k],
            stats.n_records,
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a stats CSV back, enforcing the schema: exact header, eight
/// columns, finite numbers, purity within [½, 1], non-negative variance
/// and standard errors, one shared record count.
pub fn read_stats_csv(path: &Path) -> Result<EnsembleStats, MetricsError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let parse_err = |line: usize, msg: String| MetricsError::Parse { line: line + 1, msg };

    let Some((_, header)) = lines.next() else {
        return Err(parse_err(0, "empty file".into()));
    };
    if header.trim() != STATS_HEADER {
        return Err(parse_err(0, format!("bad header {header:?}")));
    }

    let mut stats = EnsembleStats {
        times: Vec::new(),
        mean_purity: Vec::new(),
        se_purity: Vec::new(),
        mean_variance: Vec::new(),
        se_variance: Vec::new(),
        mean_info_gain: Vec::new(),
        se_info_gain: Vec::new(),
        n_records: 0,
    };
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(parse_err(lineno, format!("expected 8 columns, got {}", fields.len())));
        }
        let mut nums = [0.0f64; 7];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field
                .trim()
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad number {field:?}: {e}")))?;
            if !slot.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value {field:?}")));
            }
        }
        let n: usize = fields[7]
            .trim()
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad record count {:?}: {e}", fields[7])))?;
        let [time, p, p_se, v, v_se, di, di_se] = nums;
        const SLACK: f64 = 1e-12;
        if !(0.5 - SLACK..=1.0 + SLACK).contains(&p) {
            return Err(parse_err(lineno, format!("purity {p} outside [1/2, 1]")));
        }
        if v < -SLACK || p_se < 0.0 || v_se < 0.0 || di_se < 0.0 {
            return Err(parse_err(lineno, "negative variance or standard error".into()));
        }
        if stats.n_records == 0 {
            stats.n_records = n;
        } else if stats.n_records != n {
            return Err(parse_err(lineno, format!("record count changed to {n}")));
        }
        stats.times.push(time);
        stats.mean_purity.push(p);
        stats.se_purity.push(p_se);
        stats.mean_variance.push(v);
        stats.se_variance.push(v_se);
        stats.mean_info_gain.push(di);
        stats.se_info_gain.push(di_se);
    }
    if stats.times.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    Ok(stats)
}
