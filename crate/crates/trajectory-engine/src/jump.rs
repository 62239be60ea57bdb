//! Photon-counting (jump) schemes: direct detection and the sign-switching
//! weak-local-oscillator scheme.
//!
//! One step of length `dt` applies the measurement pair
//!
//! ```text
//! M₁ = √(γ dt) (σ + μ)                        (detection)
//! M₀ = 1 − A dt + ½A²dt²                       (no detection)
//! A  = i(H − (γμ/2)σ_y) + (γ/2)(σ+μ)†(σ+μ),   H = Ω σ_x / 2
//! ```
//!
//! with `μ = 0` for direct detection and `μ = ±mu_magnitude` for the
//! adaptive scheme. The `−(γμ/2)σ_y` term compensates the displacement of
//! the jump operator: without it the two effects would not average back to
//! the master equation. The second-order term in `M₀` keeps the effect
//! completeness defect `‖M₀†M₀ + M₁†M₁ − 1‖` at `O(dt²)` with a small
//! constant (see [`completeness_defect`]).
//!
//! Everything is reduced to Bloch components once and for all:
//!
//! - detection probability: `p₁ = γ R dt` with `R = (1+z)/2 + μx + μ²`
//!   (the expectation of `(σ+μ)†(σ+μ)`);
//! - collapse map (`T = R` is the trace of `M₁ρM₁†/(γdt)`):
//!   `x' = (μ(1+z) + μ²x)/T`, `y' = μ²y/T`, `z' = (μ²z − (1+z)/2 − μx)/T`;
//! - no-detection drift, trace-normalized:
//!   `ẋ = γ[(R − ½ − μ²)x − μ(1+z)]`,
//!   `ẏ = γ[(R − ½ − μ²)y] − Ωz`,
//!   `ż = Ωy + γ[(R − μ²)z − (1+z)/2 + μx]`,
//!   integrated with one midpoint (RK2) step per `dt`, so the per-step map
//!   error is `O(dt³)` and the weak error against the master equation is
//!   dominated by the Bernoulli discretization of the jump, `O(dt²)` per step.
//!
//! For `μ = 0` these reduce to the familiar direct-detection forms: rate
//! `γ(1+z)/2`, collapse to the ground state, and drift
//! `(γzx/2, γzy/2 − Ωz, γ(z²−1)/2 + Ωy)`.
//!
//! The μ-dependent terms keep the parity structure under `(y, Ω) → (−y, −Ω)`
//! term by term (x- and z-equations even, y-equation odd), which downstream
//! code exploits to make ±Ω posterior symmetry exact in floating point.

use bloch_core::BlochState;
use num_complex::Complex64;
use rand::Rng;

use crate::{Observation, SchemeConfig, SchemeKind, SimError, StepOutcome};

/// Detection rate `γR` for the operator `σ + μ`: `R = (1+z)/2 + μx + μ²`.
///
/// Clamped at zero: rounding can push an exactly-ground state a hair below.
pub fn jump_rate(v: &BlochState, mu: f64, gamma: f64) -> f64 {
    let r = 0.5 * (1.0 + v.z) + mu * v.x + mu * mu;
    gamma * r.max(0.0)
}

/// State after a detection, `M₁ρM₁†` renormalized.
///
/// Callers must ensure the pre-detection rate is positive; for `μ = 0` this
/// is the ground state regardless of input.
pub fn collapse_map(v: &BlochState, mu: f64) -> BlochState {
    if mu == 0.0 {
        return BlochState::ground();
    }
    let e = 0.5 * (1.0 + v.z);
    let t = e + mu * v.x + mu * mu;
    BlochState::new(
        (mu * (1.0 + v.z) + mu * mu * v.x) / t,
        (mu * mu * v.y) / t,
        (mu * mu * v.z - e - mu * v.x) / t,
    )
}

/// Trace-normalized no-detection drift (see module docs).
#[inline]
pub fn no_jump_drift(v: &BlochState, omega: f64, mu: f64, gamma: f64) -> [f64; 3] {
    if mu == 0.0 {
        // Direct detection: survival conditioning pulls toward the poles.
        return [
            0.5 * gamma * v.z * v.x,
            0.5 * gamma * v.z * v.y - omega * v.z,
            0.5 * gamma * (v.z * v.z - 1.0) + omega * v.y,
        ];
    }
    let e = 0.5 * (1.0 + v.z);
    let r = e + mu * v.x + mu * mu;
    let shrink = r - 0.5 - mu * mu;
    [
        gamma * (shrink * v.x - mu * (1.0 + v.z)),
        gamma * (shrink * v.y) - omega * v.z,
        omega * v.y + gamma * ((r - mu * mu) * v.z - e + mu * v.x),
    ]
}

/// One midpoint (RK2) step of the no-detection drift; returns the new state
/// and whether it had to be clamped back onto the Bloch ball.
#[inline]
pub fn no_jump_map(v: &BlochState, omega: f64, mu: f64, gamma: f64, dt: f64) -> (BlochState, bool) {
    let k1 = no_jump_drift(v, omega, mu, gamma);
    let mid = BlochState::new(
        v.x + 0.5 * dt * k1[0],
        v.y + 0.5 * dt * k1[1],
        v.z + 0.5 * dt * k1[2],
    );
    let k2 = no_jump_drift(&mid, omega, mu, gamma);
    let mut out = BlochState::new(v.x + dt * k2[0], v.y + dt * k2[1], v.z + dt * k2[2]);
    let clamped = out.clamp_to_ball();
    (out, clamped)
}

/// One stochastic photon-counting step.
///
/// Draws one uniform deviate, compares it against `p₁ = γRdt`, and applies
/// the collapse or the no-detection map. Returns the step outcome, the
/// local-oscillator sign for the *next* step (negated on detection for the
/// adaptive scheme, passed through otherwise), and whether the state had to
/// be clamped back onto the Bloch ball.
pub fn jump_step<R: Rng + ?Sized>(
    state: &BlochState,
    omega: f64,
    scheme: &SchemeConfig,
    mu_sign: i8,
    gamma: f64,
    dt: f64,
    rng: &mut R,
) -> Result<(StepOutcome, i8, bool), SimError> {
    let mu = match scheme.kind {
        SchemeKind::Direct => 0.0,
        SchemeKind::Adaptive => f64::from(mu_sign) * scheme.mu_magnitude,
        other => return Err(SimError::WrongStepper { scheme: other }),
    };
    let p1 = jump_rate(state, mu, gamma) * dt;
    if !(0.0..=1.0).contains(&p1) {
        return Err(SimError::JumpProbabilityOutOfRange { p: p1 });
    }
    let u: f64 = rng.gen();
    if u < p1 {
        let next = collapse_map(state, mu);
        let sign = if scheme.kind == SchemeKind::Adaptive { -mu_sign } else { mu_sign };
        Ok((StepOutcome { state: next, observed: Observation::Jump(true) }, sign, false))
    } else {
        let (next, clamped) = no_jump_map(state, omega, mu, gamma, dt);
        Ok((StepOutcome { state: next, observed: Observation::Jump(false) }, mu_sign, clamped))
    }
}

/// Spectral norm of the effect-completeness defect
/// `M₀†M₀ + M₁†M₁ − 1` for the operator pair above; scales as `O(dt²)`.
pub fn completeness_defect(omega: f64, mu: f64, gamma: f64, dt: f64) -> f64 {
    type M = [[Complex64; 2]; 2];
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let zero = c(0.0, 0.0);

    let mul = |a: &M, b: &M| -> M {
        let mut out = [[zero; 2]; 2];
        for (i, row) in a.iter().enumerate() {
            for j in 0..2 {
                out[i][j] = row[0] * b[0][j] + row[1] * b[1][j];
            }
        }
        out
    };
    let adj = |a: &M| -> M {
        [
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ]
    };

    // Basis {|e⟩, |g⟩}: σ = |g⟩⟨e|, c_op = σ + μ.
    let c_op: M = [[c(mu, 0.0), zero], [c(1.0, 0.0), c(mu, 0.0)]];
    let cdc = mul(&adj(&c_op), &c_op);
    // A = i(H − (γμ/2)σ_y) + (γ/2)c†c with H = Ωσ_x/2.
    let i_unit = c(0.0, 1.0);
    let mut a = [[zero; 2]; 2];
    let h = [
        [zero, c(0.5 * omega, 0.5 * gamma * mu)],
        [c(0.5 * omega, -0.5 * gamma * mu), zero],
    ];
    for (r, h_row) in h.iter().enumerate() {
        for (col, &h_rc) in h_row.iter().enumerate() {
            a[r][col] = i_unit * h_rc + 0.5 * gamma * cdc[r][col];
        }
    }

    // M₀ = 1 − A dt + ½ A² dt².
    let a2 = mul(&a, &a);
    let mut m0 = [[zero; 2]; 2];
    for (r, m0_row) in m0.iter_mut().enumerate() {
        for (col, m0_rc) in m0_row.iter_mut().enumerate() {
            let id = if r == col { c(1.0, 0.0) } else { zero };
            *m0_rc = id - a[r][col] * dt + 0.5 * a2[r][col] * dt * dt;
        }
    }

    // D = M₀†M₀ + γdt c†c − 1 (Hermitian).
    let m0d = mul(&adj(&m0), &m0);
    let mut d = [[zero; 2]; 2];
    for (r, d_row) in d.iter_mut().enumerate() {
        for (col, d_rc) in d_row.iter_mut().enumerate() {
            let id = if r == col { c(1.0, 0.0) } else { zero };
            *d_rc = m0d[r][col] + gamma * dt * cdc[r][col] - id;
        }
    }

    // Largest |eigenvalue| of a Hermitian 2×2.
    let half_tr = 0.5 * (d[0][0].re + d[1][1].re);
    let half_diff = 0.5 * (d[0][0].re - d[1][1].re);
    let radius = (half_diff * half_diff + d[0][1].norm_sqr()).sqrt();
    (half_tr + radius).abs().max((half_tr - radius).abs())
}
