//! Checkpointed filter runs: posterior and best-estimate snapshots along a
//! whole record.

use bloch_core::{BlochState, InitPolicy, RabiGrid, SystemParams};
use trajectory_engine::MeasurementRecord;

use crate::filter::{posterior, FilterState, Posterior};
use crate::FilterError;

/// Time series of filter readouts at monotone checkpoint times.
#[derive(Debug, Clone)]
pub struct FilterTrace {
    pub times: Vec<f64>,
    pub posteriors: Vec<Posterior>,
    pub best_estimates: Vec<BlochState>,
}

impl FilterTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Runs the filter over the whole record, capturing a snapshot at `t = 0`,
/// every `checkpoint_every` steps, and the final step (`0` = endpoints
/// only). Returns the final filter state alongside the trace.
pub fn run_filter(
    record: &MeasurementRecord,
    grid: &RabiGrid,
    params: &SystemParams,
    epsilon: f64,
    policy: InitPolicy,
    checkpoint_every: usize,
) -> Result<(FilterState, FilterTrace), FilterError> {
    let mut fstate = FilterState::new(grid.clone(), *params, epsilon, policy)?;
    let steps = record.steps();
    let stride = if checkpoint_every == 0 { usize::MAX } else { checkpoint_every };
    let mut trace = FilterTrace {
        times: Vec::new(),
        posteriors: Vec::new(),
        best_estimates: Vec::new(),
    };

    let mut snapshot = |fstate: &FilterState, step: usize| -> Result<(), FilterError> {
        let post = posterior(fstate)?;
        trace.times.push(step as f64 * record.dt);
        trace.best_estimates.push(fstate.weighted_state(&post));
        trace.posteriors.push(post);
        Ok(())
    };

    snapshot(&fstate, 0)?;
    let mut done = 0usize;
    while done < steps {
        let next = (done + stride.min(steps - done)).min(steps);
        fstate.advance_steps(record, next - done)?;
        done = next;
        snapshot(&fstate, done)?;
    }
    Ok((fstate, trace))
}
