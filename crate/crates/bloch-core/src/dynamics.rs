//! Deterministic (ensemble-averaged) dynamics: the master equation in Bloch
//! form, its steady state, and a fixed-step RK4 integrator used as the
//! reference oracle for all stochastic unravelings.

use crate::{BlochState, SystemParams};

/// Default RK4 step, `1e−3/γ`; far below the accuracy floor of any Monte
/// Carlo comparison made against this integrator.
const RK4_STEP_GAMMA_UNITS: f64 = 1e-3;

/// Right-hand side of the master equation:
/// `ẋ = −γx/2`, `ẏ = −γy/2 − Ωz`, `ż = Ωy − γ(1 + z)`.
pub fn master_rhs(v: BlochState, omega: f64, params: &SystemParams) -> [f64; 3] {
    let g = params.gamma;
    [
        -0.5 * g * v.x,
        -0.5 * g * v.y - omega * v.z,
        omega * v.y - g * (1.0 + v.z),
    ]
}

/// Steady state of the driven, damped atom:
/// `(0, 2Ωγ/D, −γ²/D)` with `D = 2Ω² + γ²`.
pub fn steady_state(omega: f64, params: &SystemParams) -> BlochState {
    let g = params.gamma;
    let d = 2.0 * omega * omega + g * g;
    BlochState::new(0.0, 2.0 * omega * g / d, -(g * g) / d)
}

/// Integrates the master equation for `duration` with fixed-step RK4.
///
/// The step is `1e−3/γ` (shortened so the duration divides evenly); the
/// representation keeps the trace exactly one by construction.
pub fn master_evolve(
    state: BlochState,
    omega: f64,
    params: &SystemParams,
    duration: f64,
) -> BlochState {
    assert!(duration >= 0.0, "duration must be non-negative");
    if duration == 0.0 {
        return state;
    }
    let h_max = RK4_STEP_GAMMA_UNITS / params.gamma;
    let n_steps = (duration / h_max).ceil().max(1.0) as u64;
    let h = duration / n_steps as f64;

    let mut v = state;
    for _ in 0..n_steps {
        v = rk4_step(v, omega, params, h);
    }
    v
}

fn rk4_step(v: BlochState, omega: f64, params: &SystemParams, h: f64) -> BlochState {
    let add = |a: BlochState, k: [f64; 3], s: f64| {
        BlochState::new(a.x + s * k[0], a.y + s * k[1], a.z + s * k[2])
    };
    let k1 = master_rhs(v, omega, params);
    let k2 = master_rhs(add(v, k1, 0.5 * h), omega, params);
    let k3 = master_rhs(add(v, k2, 0.5 * h), omega, params);
    let k4 = master_rhs(add(v, k3, h), omega, params);
    BlochState::new(
        v.x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        v.y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        v.z + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
}
