//! Whole-record simulation: iterate one stepper from an initial state for a
//! fixed duration, collecting the detector output (and optionally the
//! conditioned true state at checkpoints).

use bloch_core::{BlochState, SystemParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffusive::diffusive_step;
use crate::jump::jump_step;
use crate::{
    MeasurementRecord, Observation, Outcomes, SchemeConfig, SchemeKind, MAX_DT_GAMMA_UNITS,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("scheme `{scheme}` is not handled by this stepper")]
    WrongStepper { scheme: SchemeKind },
    #[error("jump probability {p} per step lies outside [0, 1]; reduce dt")]
    JumpProbabilityOutOfRange { p: f64 },
    #[error("step size {dt} exceeds the ceiling {max} (units 1/γ)")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("duration {duration} is not an integer multiple of dt = {dt}")]
    NonIntegralDuration { duration: f64, dt: f64 },
    #[error("invalid scheme configuration")]
    InvalidScheme,
    #[error("initial state lies outside the Bloch ball")]
    InvalidInitialState,
}

/// A record plus simulation-side bookkeeping the detector output alone does
/// not carry: conditioned-true-state snapshots and clamp statistics.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub record: MeasurementRecord,
    /// `(time, conditioned state)` pairs, starting with `(0, initial)` and
    /// always including the final step.
    pub checkpoints: Vec<(f64, BlochState)>,
    /// How many steps pushed the state off the Bloch ball and were rescaled.
    pub clamp_events: usize,
}

impl Simulation {
    /// Conditioned state at the end of the run.
    pub fn final_state(&self) -> BlochState {
        self.checkpoints.last().expect("at least the initial checkpoint").1
    }
}

/// Number of steps for a duration, requiring integral division.
pub(crate) fn step_count(duration: f64, dt: f64) -> Result<usize, SimError> {
    let steps = (duration / dt).round();
    if steps < 0.0 || (steps * dt - duration).abs() > 1e-9 * duration.abs().max(dt) {
        return Err(SimError::NonIntegralDuration { duration, dt });
    }
    Ok(steps as usize)
}

/// Simulates one full measurement record.
///
/// The record is fully determined by the arguments: the RNG is a ChaCha
/// stream seeded with `seed`, and every stepper consumes a fixed number of
/// draws per step.
pub fn simulate_record(
    omega_true: f64,
    initial: BlochState,
    scheme: &SchemeConfig,
    params: &SystemParams,
    duration: f64,
    dt: f64,
    seed: u64,
) -> Result<MeasurementRecord, SimError> {
    // No interior checkpoints: keep only the mandatory first/last snapshots.
    simulate_record_checkpointed(omega_true, initial, scheme, params, duration, dt, seed, 0)
        .map(|sim| sim.record)
}

/// As [`simulate_record`], but also captures the conditioned true state
/// every `checkpoint_every` steps (`0` = only at the start and end).
#[allow(clippy::too_many_arguments)]
pub fn simulate_record_checkpointed(
    omega_true: f64,
    initial: BlochState,
    scheme: &SchemeConfig,
    params: &SystemParams,
    duration: f64,
    dt: f64,
    seed: u64,
    checkpoint_every: usize,
) -> Result<Simulation, SimError> {
    if !scheme.is_valid() {
        return Err(SimError::InvalidScheme);
    }
    if !initial.is_valid(1e-9) {
        return Err(SimError::InvalidInitialState);
    }
    let max_dt = MAX_DT_GAMMA_UNITS / params.gamma;
    if !(dt > 0.0 && dt <= max_dt) {
        return Err(SimError::StepTooLarge { dt, max: max_dt });
    }
    let steps = step_count(duration, dt)?;
    let stride = if checkpoint_every == 0 { usize::MAX } else { checkpoint_every };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = initial;
    let mut mu_sign: i8 = 1;
    let mut clamp_events = 0usize;
    let mut checkpoints = Vec::with_capacity(2 + steps / stride.max(1));
    checkpoints.push((0.0, state));

    let mut dn = Vec::new();
    let mut mu_history = Vec::new();
    let mut currents = Vec::new();
    let mut complex = Vec::new();
    match scheme.kind {
        SchemeKind::Direct => dn.reserve(steps),
        SchemeKind::Adaptive => {
            dn.reserve(steps);
            mu_history.reserve(steps);
        }
        SchemeKind::HomodyneX | SchemeKind::HomodyneY => currents.reserve(steps),
        SchemeKind::Heterodyne => complex.reserve(steps),
    }

    for k in 1..=steps {
        if scheme.kind.is_jump() {
            if scheme.kind == SchemeKind::Adaptive {
                mu_history.push(mu_sign);
            }
            let (out, next_sign, clamped) =
                jump_step(&state, omega_true, scheme, mu_sign, params.gamma, dt, &mut rng)?;
            let Observation::Jump(jumped) = out.observed else { unreachable!() };
            dn.push(u8::from(jumped));
            state = out.state;
            mu_sign = next_sign;
            clamp_events += usize::from(clamped);
        } else {
            let (out, clamped) =
                diffusive_step(&state, omega_true, scheme, params, dt, &mut rng)?;
            match out.observed {
                Observation::Current(i) => currents.push(i),
                Observation::ComplexCurrent(c) => complex.push(c),
                Observation::Jump(_) => unreachable!(),
            }
            state = out.state;
            clamp_events += usize::from(clamped);
        }
        if k % stride == 0 || k == steps {
            checkpoints.push((k as f64 * dt, state));
        }
    }

    let outcomes = match scheme.kind {
        SchemeKind::Direct | SchemeKind::Adaptive => Outcomes::Jumps(dn),
        SchemeKind::HomodyneX | SchemeKind::HomodyneY => Outcomes::Currents(currents),
        SchemeKind::Heterodyne => Outcomes::ComplexCurrents(complex),
    };
    let record =
        MeasurementRecord { scheme: *scheme, dt, outcomes, mu_history, omega_true, seed };
    debug_assert!(record.validate().is_ok());
    Ok(Simulation { record, checkpoints, clamp_events })
}
