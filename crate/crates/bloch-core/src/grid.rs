//! The arcsine prior over the Rabi frequency and its exact grid
//! discretization.
//!
//! The drive amplitude seen by an atom parked at a uniformly random position
//! in a standing wave is `Ω = Ω_max sin(θ)` with `θ` uniform, which induces
//! the density `P₀(Ω) = 1/(π√(Ω_max² − Ω²))` on `(−Ω_max, Ω_max)`. The
//! density diverges (integrably) at the edges, so the grid is built uniform
//! in `θ` with equal masses `1/n`: that realizes `P₀` exactly with no edge
//! singularities, and keeps the grid exactly symmetric about zero.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::{steady_state, BlochError, BlochState, SystemParams};

/// Discrete grid of candidate Rabi frequencies with prior masses.
///
/// Invariants (established by [`build_grid`]): points strictly increasing;
/// exactly sign-symmetric (`points[n−1−j] == −points[j]` bitwise, middle
/// point exactly `0.0`); weights non-negative and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiGrid {
    /// Candidate Rabi frequencies `Ω_j`, ascending.
    pub points: Vec<f64>,
    /// Prior mass of each point (uniform `1/n` for the θ-midpoint grid).
    pub weights: Vec<f64>,
    /// Support bound the grid was built for.
    pub omega_max: f64,
}

impl RabiGrid {
    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Builds the θ-midpoint grid: `Ω_j = Ω_max sin(θ_j)` with
/// `θ_j = −π/2 + π(2j+1)/(2n)` and uniform weights `1/n`.
///
/// `n_points` must be odd and at least 3 so that `Ω = 0` is a grid point and
/// the negative half mirrors the positive half exactly: the negative-θ half
/// is computed once and negated, which makes the ±Ω symmetry of downstream
/// filters exact in floating point rather than merely approximate.
pub fn build_grid(params: &SystemParams, n_points: usize) -> Result<RabiGrid, BlochError> {
    if n_points < 3 {
        return Err(BlochError::GridTooSmall(n_points));
    }
    if n_points % 2 == 0 {
        return Err(BlochError::GridEven(n_points));
    }
    let n = n_points;
    let mut points = vec![0.0f64; n];
    for j in 0..n / 2 {
        let theta = -FRAC_PI_2 + PI * (2 * j + 1) as f64 / (2.0 * n as f64);
        let omega = params.omega_max * theta.sin();
        points[j] = omega;
        points[n - 1 - j] = -omega;
    }
    points[n / 2] = 0.0;
    let weights = vec![1.0 / n as f64; n];
    Ok(RabiGrid { points, weights, omega_max: params.omega_max })
}

/// Draws one Rabi frequency from the arcsine prior:
/// `θ ~ U(−π/2, π/2)`, returns `Ω_max sin(θ)`.
pub fn sample_prior<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    params.omega_max * ((u - 0.5) * PI).sin()
}

/// How a conditioned trajectory (and each filter branch) starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitPolicy {
    /// Start in the steady state of the master equation at the relevant Ω.
    Steady,
    /// Start in the ground state regardless of Ω.
    Ground,
}

impl InitPolicy {
    /// Initial Bloch vector this policy assigns to Rabi frequency `omega`.
    pub fn initial_state(self, omega: f64, params: &SystemParams) -> BlochState {
        match self {
            InitPolicy::Steady => steady_state(omega, params),
            InitPolicy::Ground => BlochState::ground(),
        }
    }
}

impl std::str::FromStr for InitPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "steady" => Ok(InitPolicy::Steady),
            "ground" => Ok(InitPolicy::Ground),
            other => Err(format!("unknown initial-state policy `{other}` (expected `steady` or `ground`)")),
        }
    }
}

impl std::fmt::Display for InitPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitPolicy::Steady => "steady",
            InitPolicy::Ground => "ground",
        })
    }
}
