//! Diffusive (current) schemes: homodyne detection at a local-oscillator
//! phase `Φ` and heterodyne detection.
//!
//! **Homodyne.** The measured quadrature is `s = x cosΦ + y sinΦ` (the
//! expectation of `σe^{iΦ} + σ†e^{−iΦ}`), the current over one step is
//! `I = √γ s + ξ` with `ξ ~ N(0, 1/dt)`, and the Itô update is
//!
//! ```text
//! v' = v + 𝓛v dt + √γ G (I − √γ s) dt
//! G  = ((1+z)cosΦ − s·x, (1+z)sinΦ − s·y, −s(1+z))
//! ```
//!
//! where `𝓛` is the master-equation drift. Two identities pin `G` down:
//! `v·G = s(1 − |v|²)` (pure states stay pure under the noise) and
//! `2v·𝓛v + γ|G|² = γ(1 − |v|²)(1 − s²)` (the norm drift vanishes on the
//! sphere and is restoring inside the ball).
//!
//! **Heterodyne.** Equivalent to splitting the fluorescence over an x- and a
//! y-homodyne at half efficiency each. The complex current is
//! `I = √γ ⟨σ⟩ + ζ` with `⟨σ⟩ = (x − iy)/2` and independent
//! `Re ζ, Im ζ ~ N(0, 1/(2dt))`. With the innovations
//! `ζ_r = Re I − √γ x/2` and `ζ_i = Im I + √γ y/2`, the Itô update is
//!
//! ```text
//! Δx = √γ [((1+z) − x²) ζ_r + x·y ζ_i] dt
//! Δy = √γ [−x·y ζ_r − ((1+z) − y²) ζ_i] dt
//! Δz = √γ (1+z) (−x ζ_r + y ζ_i) dt
//! ```
//!
//! on top of the master drift.
//!
//! Both updates are plain Euler–Maruyama; the step can push a nearly pure
//! state slightly outside the Bloch ball (the `dW²` term has mean `dt` but
//! fluctuates), in which case the state is rescaled onto the sphere and the
//! event counted.

use bloch_core::{master_rhs, BlochState, SystemParams};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Observation, SchemeConfig, SchemeKind, SimError, StepOutcome};

/// Measured quadrature `s = x cosΦ + y sinΦ`.
#[inline]
pub fn quadrature(v: &BlochState, cos_phi: f64, sin_phi: f64) -> f64 {
    v.x * cos_phi + v.y * sin_phi
}

impl SchemeConfig {
    /// `(cosΦ, sinΦ)` with exact constants for the two canonical phases, so
    /// that e.g. HomodyneX carries no `~1e−17` y-quadrature admixture.
    pub fn lo_components(&self) -> (f64, f64) {
        match self.kind {
            SchemeKind::HomodyneX => (1.0, 0.0),
            SchemeKind::HomodyneY => (0.0, 1.0),
            _ => (self.phi.cos(), self.phi.sin()),
        }
    }
}

/// Applies one homodyne step given the observed current sample.
///
/// Shared by the generator (which drew the current) and the filter (which
/// replays a recorded one). Returns the new state and whether it was clamped.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn homodyne_apply(
    v: &BlochState,
    omega: f64,
    gamma: f64,
    cos_phi: f64,
    sin_phi: f64,
    current: f64,
    dt: f64,
    params: &SystemParams,
) -> (BlochState, bool) {
    let sqrt_g = gamma.sqrt();
    let s = quadrature(v, cos_phi, sin_phi);
    let innovation_dt = (current - sqrt_g * s) * dt;
    let drift = master_rhs(*v, omega, params);
    let e = 1.0 + v.z;
    let gx = e * cos_phi - s * v.x;
    let gy = e * sin_phi - s * v.y;
    let gz = -s * e;
    let mut out = BlochState::new(
        v.x + drift[0] * dt + sqrt_g * gx * innovation_dt,
        v.y + drift[1] * dt + sqrt_g * gy * innovation_dt,
        v.z + drift[2] * dt + sqrt_g * gz * innovation_dt,
    );
    let clamped = out.clamp_to_ball();
    (out, clamped)
}

/// Applies one heterodyne step given the observed complex current sample.
#[inline]
pub fn heterodyne_apply(
    v: &BlochState,
    omega: f64,
    gamma: f64,
    current_re: f64,
    current_im: f64,
    dt: f64,
    params: &SystemParams,
) -> (BlochState, bool) {
    let sqrt_g = gamma.sqrt();
    // Innovations: E[Re I] = √γ x/2, E[Im I] = −√γ y/2.
    let zr_dt = (current_re - 0.5 * sqrt_g * v.x) * dt;
    let zi_dt = (current_im + 0.5 * sqrt_g * v.y) * dt;
    let drift = master_rhs(*v, omega, params);
    let e = 1.0 + v.z;
    let mut out = BlochState::new(
        v.x + drift[0] * dt + sqrt_g * ((e - v.x * v.x) * zr_dt + v.x * v.y * zi_dt),
        v.y + drift[1] * dt + sqrt_g * (-v.x * v.y * zr_dt - (e - v.y * v.y) * zi_dt),
        v.z + drift[2] * dt + sqrt_g * (e * (-v.x * zr_dt + v.y * zi_dt)),
    );
    let clamped = out.clamp_to_ball();
    (out, clamped)
}

/// One stochastic diffusive step: draws the current, applies the update.
///
/// Homodyne draws one standard normal (`ξ = N/√dt`); heterodyne draws two in
/// the order (real, imaginary), each scaled to variance `1/(2dt)`. Returns
/// the outcome and whether the state had to be clamped back onto the Bloch
/// ball (expected now and then for nearly pure states: the `dW²` term of the
/// Euler–Maruyama norm fluctuates around its mean `dt`).
pub fn diffusive_step<R: Rng + ?Sized>(
    state: &BlochState,
    omega: f64,
    scheme: &SchemeConfig,
    params: &SystemParams,
    dt: f64,
    rng: &mut R,
) -> Result<(StepOutcome, bool), SimError> {
    let gamma = params.gamma;
    match scheme.kind {
        SchemeKind::HomodyneX | SchemeKind::HomodyneY => {
            let (cos_phi, sin_phi) = scheme.lo_components();
            let xi: f64 = rng.sample::<f64, _>(StandardNormal) / dt.sqrt();
            let current = gamma.sqrt() * quadrature(state, cos_phi, sin_phi) + xi;
            let (next, clamped) =
                homodyne_apply(state, omega, gamma, cos_phi, sin_phi, current, dt, params);
            Ok((StepOutcome { state: next, observed: Observation::Current(current) }, clamped))
        }
        SchemeKind::Heterodyne => {
            let scale = 1.0 / (2.0 * dt).sqrt();
            let zr: f64 = rng.sample::<f64, _>(StandardNormal);
            let zi: f64 = rng.sample::<f64, _>(StandardNormal);
            let re = 0.5 * gamma.sqrt() * state.x + zr * scale;
            let im = -0.5 * gamma.sqrt() * state.y + zi * scale;
            let (next, clamped) = heterodyne_apply(state, omega, gamma, re, im, dt, params);
            Ok((
                StepOutcome { state: next, observed: Observation::ComplexCurrent([re, im]) },
                clamped,
            ))
        }
        other => Err(SimError::WrongStepper { scheme: other }),
    }
}
