//! State algebra for a resonantly driven, spontaneously decaying two-level
//! atom, written entirely in Bloch-vector form.
//!
//! Conventions used throughout the workspace:
//! - basis order is `{|e⟩, |g⟩}` and the lowering operator is `σ = |g⟩⟨e|`,
//!   so `ρ_eg = ⟨e|ρ|g⟩ = (x − iy)/2` and `⟨σ†σ⟩ = (1 + z)/2`;
//! - the density matrix is `ρ = ½(1 + xσ_x + yσ_y + zσ_z)`;
//! - the drive enters as the Hamiltonian `H = Ωσ_x/2` and the decay channel
//!   as `√γ σ`, giving the master equation in Bloch form
//!   `ẋ = −γx/2`, `ẏ = −γy/2 − Ωz`, `ż = Ωy − γ(1 + z)`;
//! - `γ` sets the time unit and `Ω` is quoted in units of `γ`.
//!
//! The crate deliberately avoids complex matrices: every operator expression
//! used elsewhere in the workspace has been reduced to real update rules for
//! `(x, y, z)`, which keeps Hermiticity and unit trace automatic.

mod dynamics;
mod grid;
mod state;

pub use dynamics::{master_evolve, master_rhs, steady_state};
pub use grid::{build_grid, sample_prior, InitPolicy, RabiGrid};
pub use state::{BlochState, BLOCH_NORM_TOL};

use thiserror::Error;

/// Decay rate and prior support bound for one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Spontaneous-emission rate `γ > 0`; sets the time unit.
    pub gamma: f64,
    /// Largest Rabi frequency the prior allows, `Ω_max > 0` (units of `γ`).
    pub omega_max: f64,
}

impl SystemParams {
    /// Validates and builds the parameter set.
    pub fn new(gamma: f64, omega_max: f64) -> Result<Self, BlochError> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(BlochError::NonPositiveGamma(gamma));
        }
        if !omega_max.is_finite() || omega_max <= 0.0 {
            return Err(BlochError::NonPositiveOmegaMax(omega_max));
        }
        Ok(Self { gamma, omega_max })
    }
}

impl Default for SystemParams {
    /// `γ = 1`, `Ω_max = 10γ` — the defaults used by every experiment here.
    fn default() -> Self {
        Self { gamma: 1.0, omega_max: 10.0 }
    }
}

/// Errors from parameter validation and grid construction.
#[derive(Debug, Error, PartialEq)]
pub enum BlochError {
    #[error("decay rate gamma must be positive and finite, got {0}")]
    NonPositiveGamma(f64),
    #[error("omega_max must be positive and finite, got {0}")]
    NonPositiveOmegaMax(f64),
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("grid size must be odd so that Omega = 0 is a grid point, got {0}")]
    GridEven(usize),
}
