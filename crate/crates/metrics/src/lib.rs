//! Quantifying what a measurement record taught us about the Rabi frequency.
//!
//! Three scalar measures are tracked along a filtered record:
//!
//! * the posterior variance of Ω (units of γ²) — how tightly the magnitude
//!   is pinned down;
//! * the information gain in bits — the drop in Shannon entropy of the grid
//!   posterior relative to the prior, which also registers sign information
//!   and multimodal structure that the variance misses;
//! * the purity of the best-estimate state — how well the observer knows
//!   the quantum state itself, marginalizing over the unknown Ω.
//!
//! [`ensemble_run`] averages all three over many independent records, each
//! with its own Ω drawn from the prior, and attaches standard errors.
//! Everything is deterministic given the master seed: per-record RNG streams
//! are derived by index, records run in parallel, and the reduction is
//! performed in record-index order so the thread count never changes a bit
//! of the output.

mod ensemble;
mod posterior;

pub use ensemble::{
    ensemble_run, read_stats_csv, record_omega, record_series, record_sim_seed, write_stats_csv,
    EnsembleStats, RecordSeries,
};
pub use posterior::{info_gain, posterior_mean, posterior_variance};

use bloch_core::BlochError;
use linear_filter::FilterError;
use trajectory_engine::SimError;

/// Any failure while computing measures or running an ensemble.
#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    /// Standard errors need at least two records.
    #[error("ensemble needs at least 2 records, got {0}")]
    TooFewRecords(usize),
    /// The estimation grid could not be built.
    #[error("bad grid: {0}")]
    Grid(#[from] BlochError),
    /// One record's simulation failed; the seed identifies it exactly.
    #[error("record {index} (seed {seed}) failed to simulate: {source}")]
    Record {
        index: usize,
        seed: u64,
        #[source]
        source: SimError,
    },
    /// One record's filtering failed; the seed identifies it exactly.
    #[error("record {index} (seed {seed}) failed to filter: {source}")]
    Filter {
        index: usize,
        seed: u64,
        #[source]
        source: FilterError,
    },
    /// Reading or writing a stats CSV failed.
    #[error("stats file error: {0}")]
    Io(#[from] std::io::Error),
    /// A stats CSV did not match the expected schema.
    #[error("stats file parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
