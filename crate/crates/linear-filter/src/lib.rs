//! Grid Bayesian filter for the Rabi frequency of a continuously monitored
//! two-level atom.
//!
//! The estimation problem: the detector output (a measurement record from
//! `trajectory-engine`) was generated at some unknown Rabi frequency Ω drawn
//! from the standing-wave prior. For every candidate Ω on a [`RabiGrid`]
//! this filter propagates the conditioned state under the *recorded*
//! outcomes and accumulates the log-likelihood of the record given that Ω.
//! Bayes' rule then turns prior weights and log-likelihoods into a
//! [`Posterior`], and the posterior-weighted average of the per-Ω
//! conditioned states is the best-estimate state of the atom.
//!
//! Likelihoods are tracked relative to an *ostensible* measure (an
//! Ω-independent reference process: clicks at a constant rate ε, currents as
//! pure white noise). The reference cancels in Bayes' rule, so its choice —
//! exposed as `epsilon` for the jump schemes — cannot affect the posterior;
//! a test pins this. Working with trace-normalized states plus log-norms
//! avoids underflow on records much longer than `1/γ`.
//!
//! Branch updates reuse the exact per-step maps of `trajectory-engine`, so
//! the branch at the generating Ω retraces the generator bit for bit, and
//! the accumulated likelihood equals the product of the generator's actual
//! per-step outcome probabilities.
//!
//! [`RabiGrid`]: bloch_core::RabiGrid

mod branch;
mod filter;
mod trace;

pub use branch::{linear_diffusive_step, linear_jump_step, Branch};
pub use filter::{advance_filter, best_estimate, posterior, FilterState, Posterior};
pub use trace::{run_filter, FilterTrace};

/// Default ostensible click rate, in units of γ: the same order as the
/// schemes' typical detection rates, which keeps the per-step trace
/// multipliers near 1.
pub const DEFAULT_EPSILON_GAMMA_UNITS: f64 = 0.25;

#[derive(Debug, thiserror::Error)]
pub enum FilterError {
    #[error("conditioned trace went non-positive at grid point Ω = {omega}; dt too large")]
    NonPositiveTrace { omega: f64 },
    #[error("every grid point has zero likelihood — record inconsistent with the model")]
    AllBranchesDead,
    #[error("record payload does not match the scheme it claims")]
    PayloadMismatch,
    #[error("ostensible rate must be positive and below 1/dt, got {0}")]
    BadEpsilon(f64),
    #[error("advance target {upto} is not a step boundary of dt = {dt}")]
    NonIntegralUpto { upto: f64, dt: f64 },
    #[error("cannot advance backwards: target step {target} < current {current}")]
    Backwards { target: usize, current: usize },
    #[error("advance target exceeds the record ({target} > {steps} steps)")]
    PastEnd { target: usize, steps: usize },
    #[error("grid must be non-empty")]
    EmptyGrid,
}
