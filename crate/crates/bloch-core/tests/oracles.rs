//! Closed-form oracles for the deterministic layer: steady states, the
//! undriven decay solution, and exact grid moments. These values are frozen
//! here independently of the implementation.

use approx::assert_abs_diff_eq;
use bloch_core::{build_grid, master_evolve, steady_state, BlochState, SystemParams};

#[test]
fn steady_state_at_omega_five() {
    // D = 2·25 + 1 = 51 ⇒ (0, 10/51, −1/51).
    let params = SystemParams::default();
    let v = steady_state(5.0, &params);
    assert_eq!(v.x, 0.0);
    assert_abs_diff_eq!(v.y, 10.0 / 51.0, epsilon = 1e-15);
    assert_abs_diff_eq!(v.z, -1.0 / 51.0, epsilon = 1e-15);
    // purity = ½(1 + (10/51)² + (1/51)²) = 1351/2601.
    assert_abs_diff_eq!(v.purity(), 1351.0 / 2601.0, epsilon = 1e-15);
    assert_abs_diff_eq!(v.purity(), 0.519416, epsilon = 5e-7);
}

#[test]
fn undriven_decay_matches_closed_form() {
    // With Ω = 0 the excited population decays exponentially:
    // z(t) = 2e^{−γt} − 1, x = y = 0.
    let params = SystemParams::default();
    for &t in &[0.1, 0.5, 1.0, 3.0, 10.0] {
        let v = master_evolve(BlochState::excited(), 0.0, &params, t);
        assert_eq!(v.x, 0.0);
        assert_eq!(v.y, 0.0);
        assert_abs_diff_eq!(v.z, 2.0 * (-t).exp() - 1.0, epsilon = 1e-10);
    }
}

#[test]
fn damped_rabi_oscillation_against_dense_reference() {
    // Cross-check the default-step integrator against itself at a 10× finer
    // step by splitting the interval (the integrator halves its step to make
    // the duration divide evenly, so unequal segmentations genuinely differ).
    let params = SystemParams::default();
    let coarse = master_evolve(BlochState::ground(), 5.0, &params, 7.0);
    let mut fine = BlochState::ground();
    for _ in 0..70_000 {
        fine = master_evolve(fine, 5.0, &params, 1e-4);
    }
    assert_abs_diff_eq!(coarse.x, fine.x, epsilon = 1e-9);
    assert_abs_diff_eq!(coarse.y, fine.y, epsilon = 1e-9);
    assert_abs_diff_eq!(coarse.z, fine.z, epsilon = 1e-9);
}

#[test]
fn grid_second_moment_is_half_omega_max_squared() {
    // The θ-midpoint grid integrates sin² exactly: Σ w_j Ω_j² = Ω_max²/2
    // for every odd n (geometric cancellation of Σ cos(2θ_j)).
    let params = SystemParams::default();
    for &n in &[3usize, 21, 201, 1001] {
        let grid = build_grid(&params, n).unwrap();
        let m2: f64 = grid
            .points
            .iter()
            .zip(&grid.weights)
            .map(|(&o, &w)| w * o * o)
            .sum();
        assert_abs_diff_eq!(m2, 50.0, epsilon = 1e-10);
    }
}

#[test]
fn grid_weights_sum_to_one() {
    let params = SystemParams::default();
    let grid = build_grid(&params, 201).unwrap();
    let total: f64 = grid.weights.iter().sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
}
