//! Per-grid-point branch of the filter: a trace-normalized conditioned state
//! plus the accumulated log of the unnormalized trace, updated one recorded
//! outcome at a time.
//!
//! All log-norms are *relative to the ostensible measure* under which the
//! record is treated as exchangeable noise: clicks as a Bernoulli stream at
//! rate ε for the jump schemes, currents as mean-zero Gaussians of variance
//! `1/dt` (homodyne) or two of variance `1/(2dt)` (heterodyne). Per step:
//!
//! ```text
//! jump,    dN=1:  log_norm += ln(γR/ε)            then collapse
//! jump,    dN=0:  pending  *= (1−γR dt)/(1−ε dt)  then no-click drift
//! homodyne:       log_norm += dt(√γ s I − γ s²/2)           s = x cosΦ + y sinΦ
//! heterodyne:     log_norm += dt(√γ(x·Re I − y·Im I) − γ(x²+y²)/4)
//! ```
//!
//! where `γR` is the branch's click rate. The diffusive increments are the
//! exact log-ratios of the true to the ostensible Gaussian densities, and
//! the jump factors are the exact ratios of Bernoulli masses, so the
//! accumulated weight is the record's true likelihood under the branch's Ω
//! up to one common Ω-independent factor.
//!
//! No-click survival factors are accumulated multiplicatively in `pending`
//! and folded into `log_norm` only at clicks and readouts, saving a
//! logarithm per step.

use bloch_core::{BlochState, SystemParams};
use trajectory_engine::diffusive::{heterodyne_apply, homodyne_apply, quadrature};
use trajectory_engine::jump::{collapse_map, jump_rate, no_jump_map};
use trajectory_engine::{Observation, SchemeConfig, SchemeKind};

use crate::FilterError;

/// One candidate Ω's conditioned state and likelihood bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    /// Trace-normalized conditioned state given this branch's Ω.
    pub state: BlochState,
    /// Accumulated log-trace of the unnormalized linear state.
    pub log_norm: f64,
    /// Product of survival factors not yet folded into `log_norm`.
    pub pending: f64,
    /// Set once the branch's likelihood hits exact zero (a click from a
    /// state that cannot click); the branch then stays at weight 0.
    pub dead: bool,
}

impl Branch {
    pub fn new(state: BlochState) -> Self {
        Self { state, log_norm: 0.0, pending: 1.0, dead: false }
    }

    /// Full accumulated log-weight (folds `pending` on the fly).
    pub fn log_weight(&self) -> f64 {
        self.log_norm + self.pending.ln()
    }

    fn fold_pending(&mut self) {
        self.log_norm += self.pending.ln();
        self.pending = 1.0;
    }
}

/// Advances one branch through one recorded jump-scheme step.
///
/// `mu` is the signed adaptive LO amplitude in effect during the step
/// (`0` for direct detection); `inv_survive_ostensible` is the precomputed
/// `1/(1 − ε dt)`.
#[allow(clippy::too_many_arguments)]
pub fn linear_jump_step(
    branch: &mut Branch,
    clicked: bool,
    mu: f64,
    omega: f64,
    gamma: f64,
    dt: f64,
    epsilon: f64,
    inv_survive_ostensible: f64,
) -> Result<(), FilterError> {
    if branch.dead {
        return Ok(());
    }
    let rate = jump_rate(&branch.state, mu, gamma);
    if clicked {
        if rate <= 0.0 {
            branch.dead = true;
            return Ok(());
        }
        branch.fold_pending();
        branch.log_norm += (rate / epsilon).ln();
        branch.state = collapse_map(&branch.state, mu);
    } else {
        let survive = 1.0 - rate * dt;
        if survive <= 0.0 {
            return Err(FilterError::NonPositiveTrace { omega });
        }
        branch.pending *= survive * inv_survive_ostensible;
        branch.state = no_jump_map(&branch.state, omega, mu, gamma, dt).0;
    }
    Ok(())
}

/// Advances one branch through one recorded current sample.
pub fn linear_diffusive_step(
    branch: &mut Branch,
    observed: &Observation,
    omega: f64,
    scheme: &SchemeConfig,
    params: &SystemParams,
    dt: f64,
) -> Result<(), FilterError> {
    if branch.dead {
        return Ok(());
    }
    let gamma = params.gamma;
    let v = &branch.state;
    match (scheme.kind, observed) {
        (SchemeKind::HomodyneX | SchemeKind::HomodyneY, Observation::Current(i)) => {
            let (cos_phi, sin_phi) = scheme.lo_components();
            let s = quadrature(v, cos_phi, sin_phi);
            branch.log_norm += dt * (gamma.sqrt() * s * i - 0.5 * gamma * s * s);
            branch.state =
                homodyne_apply(v, omega, gamma, cos_phi, sin_phi, *i, dt, params).0;
        }
        (SchemeKind::Heterodyne, Observation::ComplexCurrent([re, im])) => {
            branch.log_norm += dt
                * (gamma.sqrt() * (v.x * re - v.y * im)
                    - 0.25 * gamma * (v.x * v.x + v.y * v.y));
            branch.state = heterodyne_apply(v, omega, gamma, *re, *im, dt, params).0;
        }
        _ => return Err(FilterError::PayloadMismatch),
    }
    Ok(())
}
