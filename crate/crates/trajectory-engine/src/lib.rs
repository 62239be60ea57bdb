//! Stochastic trajectory generation for a continuously monitored two-level
//! atom.
//!
//! Five detection schemes are implemented, all unraveling the same master
//! equation (see `bloch-core`):
//!
//! - **Direct**: photon counting of the full fluorescence; per-step jump bit.
//! - **Adaptive**: photon counting after adding a weak local oscillator of
//!   amplitude `±μ` whose sign flips at every detection; jump bit plus the
//!   sign history.
//! - **HomodyneX / HomodyneY**: infinite-amplitude local oscillator at phase
//!   `Φ = 0` or `π/2`; continuous real current.
//! - **Heterodyne**: detuned local oscillator, coarse-grained over the beat
//!   period; continuous complex current.
//!
//! Generators and the Bayesian filter (crate `linear-filter`) share the exact
//! same per-step state maps exported here, so a filter branch evaluated at
//! the true Rabi frequency reproduces the generating trajectory bit for bit.
//! All randomness is drawn from a counter-seeded ChaCha stream; records are
//! fully determined by `(seed, configuration)`.

pub mod diffusive;
pub mod jump;
mod record;
mod simulate;

pub use record::{
    record_seed, MeasurementRecord, Observation, Outcomes, RecordError, StepOutcome,
};
pub use simulate::{simulate_record, simulate_record_checkpointed, SimError, Simulation};

use std::f64::consts::FRAC_PI_2;

/// Hard ceiling on the step size, in units of `1/γ`.
pub const MAX_DT_GAMMA_UNITS: f64 = 1e-2;

/// Which detection scheme monitors the fluorescence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Direct,
    Adaptive,
    HomodyneX,
    HomodyneY,
    Heterodyne,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Direct,
        SchemeKind::Adaptive,
        SchemeKind::HomodyneX,
        SchemeKind::HomodyneY,
        SchemeKind::Heterodyne,
    ];

    /// Whether the record is a jump bit stream (as opposed to a current).
    pub fn is_jump(self) -> bool {
        matches!(self, SchemeKind::Direct | SchemeKind::Adaptive)
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::Direct => "direct",
            SchemeKind::Adaptive => "adaptive",
            SchemeKind::HomodyneX => "homodyne_x",
            SchemeKind::HomodyneY => "homodyne_y",
            SchemeKind::Heterodyne => "heterodyne",
        })
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(SchemeKind::Direct),
            "adaptive" => Ok(SchemeKind::Adaptive),
            "homodyne_x" => Ok(SchemeKind::HomodyneX),
            "homodyne_y" => Ok(SchemeKind::HomodyneY),
            "heterodyne" => Ok(SchemeKind::Heterodyne),
            other => Err(format!(
                "unknown scheme `{other}` (expected direct, adaptive, homodyne_x, homodyne_y or heterodyne)"
            )),
        }
    }
}

/// A detection scheme with its fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    /// Local-oscillator phase; `0` for HomodyneX, `π/2` for HomodyneY,
    /// unused by the other schemes.
    pub phi: f64,
    /// Magnitude of the adaptive local-oscillator amplitude (dimensionless).
    pub mu_magnitude: f64,
}

impl SchemeConfig {
    /// Canonical configuration for a scheme kind (`μ = ½`, phase by kind).
    pub fn new(kind: SchemeKind) -> Self {
        let phi = match kind {
            SchemeKind::HomodyneY => FRAC_PI_2,
            _ => 0.0,
        };
        Self { kind, phi, mu_magnitude: 0.5 }
    }

    /// Parameter sanity: phase within one turn, positive LO magnitude.
    pub fn is_valid(&self) -> bool {
        (0.0..std::f64::consts::TAU).contains(&self.phi) && self.mu_magnitude > 0.0
    }
}
