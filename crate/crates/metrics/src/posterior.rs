//! Scalar knowledge measures of a single grid posterior.

use bloch_core::RabiGrid;
use linear_filter::Posterior;

/// Posterior mean of Ω, `Σ wⱼ Ωⱼ` (units of γ).
pub fn posterior_mean(post: &Posterior) -> f64 {
    post.weights.iter().zip(&post.grid.points).map(|(w, o)| w * o).sum()
}

/// Posterior variance of Ω, `Σ wⱼ Ωⱼ² − (Σ wⱼ Ωⱼ)²` (units of γ²).
pub fn posterior_variance(post: &Posterior) -> f64 {
    let mean = posterior_mean(post);
    let second: f64 = post.weights.iter().zip(&post.grid.points).map(|(w, o)| w * o * o).sum();
    second - mean * mean
}

/// Information gained over the prior, in bits.
///
/// Computed as the drop in grid Shannon entropy,
/// `Σ wⱼ log₂ wⱼ − Σ pⱼ log₂ pⱼ`, with `0·log 0 := 0`. The grid cells are
/// uniform in the arcsine variable θ, so this equals the difference of
/// differential entropies taken with the cell measure as reference — zero
/// exactly when the posterior equals the prior, and stable under grid
/// refinement.
///
/// # Panics
///
/// If `post` and `prior` have different numbers of grid points.
pub fn info_gain(post: &Posterior, prior: &RabiGrid) -> f64 {
    assert_eq!(
        post.weights.len(),
        prior.weights.len(),
        "posterior and prior must share one grid"
    );
    let plogp = |masses: &[f64]| -> f64 {
        masses.iter().filter(|&&m| m > 0.0).map(|&m| m * m.log2()).sum()
    };
    plogp(&post.weights) - plogp(&prior.weights)
}
