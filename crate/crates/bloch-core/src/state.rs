//! The Bloch-vector carrier type.

/// Numerical slack allowed on `x² + y² + z² ≤ 1` before a state is rescaled
/// back onto the unit ball. Euler–Maruyama steps can overshoot transiently.
pub const BLOCH_NORM_TOL: f64 = 1e-6;

/// A qubit state as the real Bloch vector of `ρ = ½(1 + xσ_x + yσ_y + zσ_z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Ground state `|g⟩⟨g|`, Bloch vector `(0, 0, −1)`.
    pub const fn ground() -> Self {
        Self::new(0.0, 0.0, -1.0)
    }

    /// Excited state `|e⟩⟨e|`, Bloch vector `(0, 0, 1)`.
    pub const fn excited() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    /// Squared Euclidean length of the Bloch vector.
    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Purity `Tr[ρ²] = ½(1 + x² + y² + z²)`; 1 for pure states, ½ for the
    /// maximally mixed state.
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.norm_sq())
    }

    /// Whether the vector lies inside the unit ball up to `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.norm_sq() <= 1.0 + tol && self.norm_sq().is_finite()
    }

    /// Rescales the vector onto the unit sphere if it exceeds the ball by
    /// more than [`BLOCH_NORM_TOL`]; returns `true` if a rescale happened.
    ///
    /// Callers count these events: frequent clamping signals a step size too
    /// large for the scheme being integrated.
    pub fn clamp_to_ball(&mut self) -> bool {
        let n2 = self.norm_sq();
        if n2 > 1.0 + BLOCH_NORM_TOL {
            let inv = 1.0 / n2.sqrt();
            self.x *= inv;
            self.y *= inv;
            self.z *= inv;
            true
        } else {
            false
        }
    }
}
