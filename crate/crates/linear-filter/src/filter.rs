//! The filter proper: one branch per grid point, advanced in lockstep
//! through a measurement record, plus Bayes readout.

use bloch_core::{BlochState, InitPolicy, RabiGrid, SystemParams};
use trajectory_engine::{MeasurementRecord, Observation, Outcomes, SchemeKind};

use crate::branch::{linear_diffusive_step, linear_jump_step, Branch};
use crate::FilterError;

/// Posterior over the grid: `weights[j] = P(Ω_j | record so far)`.
#[derive(Debug, Clone)]
pub struct Posterior {
    pub grid: RabiGrid,
    pub weights: Vec<f64>,
}

/// All per-grid-point branches plus the processing position in the record.
#[derive(Debug, Clone)]
pub struct FilterState {
    pub grid: RabiGrid,
    pub branches: Vec<Branch>,
    /// Ostensible click rate for the jump schemes; cancels in the posterior.
    pub epsilon: f64,
    pub params: SystemParams,
    steps_done: usize,
}

impl FilterState {
    /// One branch per grid point, each starting from the state the
    /// preparation policy implies *for that branch's Ω*.
    pub fn new(
        grid: RabiGrid,
        params: SystemParams,
        epsilon: f64,
        policy: InitPolicy,
    ) -> Result<Self, FilterError> {
        if grid.is_empty() {
            return Err(FilterError::EmptyGrid);
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(FilterError::BadEpsilon(epsilon));
        }
        let branches = grid
            .points
            .iter()
            .map(|&omega| Branch::new(policy.initial_state(omega, &params)))
            .collect();
        Ok(Self { grid, branches, epsilon, params, steps_done: 0 })
    }

    /// Record steps processed so far.
    pub fn steps_done(&self) -> usize {
        self.steps_done
    }

    /// Posterior-weighted average of the branch states.
    pub fn weighted_state(&self, posterior: &Posterior) -> BlochState {
        let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
        for (branch, &w) in self.branches.iter().zip(&posterior.weights) {
            x += w * branch.state.x;
            y += w * branch.state.y;
            z += w * branch.state.z;
        }
        BlochState::new(x, y, z)
    }

    /// Advances every branch by exactly `n` further record entries.
    pub fn advance_steps(
        &mut self,
        record: &MeasurementRecord,
        n: usize,
    ) -> Result<(), FilterError> {
        let target = self.steps_done + n;
        if target > record.steps() {
            return Err(FilterError::PastEnd { target, steps: record.steps() });
        }
        let dt = record.dt;
        let gamma = self.params.gamma;
        let scheme = record.scheme;
        let eps_dt = self.epsilon * dt;
        if scheme.kind.is_jump() && !(eps_dt.is_finite() && eps_dt < 1.0) {
            return Err(FilterError::BadEpsilon(self.epsilon));
        }
        let inv_survive_ostensible = 1.0 / (1.0 - self.epsilon * dt);

        for k in self.steps_done..target {
            match &record.outcomes {
                Outcomes::Jumps(dn) => {
                    let clicked = dn[k] == 1;
                    let mu = match scheme.kind {
                        SchemeKind::Direct => 0.0,
                        SchemeKind::Adaptive => {
                            f64::from(record.mu_history[k]) * scheme.mu_magnitude
                        }
                        _ => return Err(FilterError::PayloadMismatch),
                    };
                    for (branch, &omega) in self.branches.iter_mut().zip(&self.grid.points) {
                        linear_jump_step(
                            branch,
                            clicked,
                            mu,
                            omega,
                            gamma,
                            dt,
                            self.epsilon,
                            inv_survive_ostensible,
                        )?;
                    }
                }
                Outcomes::Currents(currents) => {
                    let observed = Observation::Current(currents[k]);
                    for (branch, &omega) in self.branches.iter_mut().zip(&self.grid.points) {
                        linear_diffusive_step(branch, &observed, omega, &scheme, &self.params, dt)?;
                    }
                }
                Outcomes::ComplexCurrents(currents) => {
                    let observed = Observation::ComplexCurrent(currents[k]);
                    for (branch, &omega) in self.branches.iter_mut().zip(&self.grid.points) {
                        linear_diffusive_step(branch, &observed, omega, &scheme, &self.params, dt)?;
                    }
                }
            }
            self.steps_done += 1;
        }
        Ok(())
    }
}

/// Advances the filter up to time `upto` (a step boundary of the record).
pub fn advance_filter(
    fstate: &mut FilterState,
    record: &MeasurementRecord,
    upto: f64,
) -> Result<(), FilterError> {
    let dt = record.dt;
    let target_f = upto / dt;
    let target = target_f.round();
    if (target - target_f).abs() > 1e-6 || target < 0.0 {
        return Err(FilterError::NonIntegralUpto { upto, dt });
    }
    let target = target as usize;
    if target < fstate.steps_done() {
        return Err(FilterError::Backwards { target, current: fstate.steps_done() });
    }
    fstate.advance_steps(record, target - fstate.steps_done())
}

/// Bayes readout: prior × accumulated likelihood, normalized with a
/// max-log shift. Dead branches get weight exactly 0.
pub fn posterior(fstate: &FilterState) -> Result<Posterior, FilterError> {
    let mut max_log = f64::NEG_INFINITY;
    for branch in &fstate.branches {
        if !branch.dead {
            max_log = max_log.max(branch.log_weight());
        }
    }
    if max_log == f64::NEG_INFINITY {
        return Err(FilterError::AllBranchesDead);
    }
    let mut weights: Vec<f64> = fstate
        .branches
        .iter()
        .zip(&fstate.grid.weights)
        .map(|(branch, &prior)| {
            if branch.dead {
                0.0
            } else {
                prior * (branch.log_weight() - max_log).exp()
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(Posterior { grid: fstate.grid.clone(), weights })
}

/// Best-estimate state: the posterior-weighted mean of the branch states.
pub fn best_estimate(fstate: &FilterState) -> Result<BlochState, FilterError> {
    let post = posterior(fstate)?;
    Ok(fstate.weighted_state(&post))
}
