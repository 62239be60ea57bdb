//! Brute-force probability calculators used to cross-check the filter's
//! accumulated log-weights, computed with none of the filter's machinery:
//! straight per-step products of outcome probabilities (jump schemes) or
//! Gaussian densities (diffusive schemes).

use bloch_core::{BlochState, SystemParams};
use trajectory_engine::diffusive::{heterodyne_apply, homodyne_apply, quadrature};
use trajectory_engine::jump::{collapse_map, jump_rate, no_jump_map};
use trajectory_engine::{MeasurementRecord, Outcomes, SchemeKind};

/// Log of the true probability (density) of `record` if the Rabi frequency
/// were `omega`, starting from `initial`.
pub fn brute_force_log_prob(
    record: &MeasurementRecord,
    omega: f64,
    initial: BlochState,
    params: &SystemParams,
) -> f64 {
    let dt = record.dt;
    let gamma = params.gamma;
    let mut v = initial;
    let mut log_p = 0.0;
    match (&record.outcomes, record.scheme.kind) {
        (Outcomes::Jumps(dn), SchemeKind::Direct | SchemeKind::Adaptive) => {
            for (k, &bit) in dn.iter().enumerate() {
                let mu = if record.scheme.kind == SchemeKind::Adaptive {
                    f64::from(record.mu_history[k]) * record.scheme.mu_magnitude
                } else {
                    0.0
                };
                let p_click = jump_rate(&v, mu, gamma) * dt;
                if bit == 1 {
                    log_p += p_click.ln(); // −∞ if the state cannot click
                    v = collapse_map(&v, mu);
                } else {
                    log_p += (1.0 - p_click).ln();
                    v = no_jump_map(&v, omega, mu, gamma, dt).0;
                }
            }
        }
        (Outcomes::Currents(currents), SchemeKind::HomodyneX | SchemeKind::HomodyneY) => {
            let (cos_phi, sin_phi) = record.scheme.lo_components();
            // I ~ N(√γ s, 1/dt)
            let log_norm_const = 0.5 * (dt / std::f64::consts::TAU).ln();
            for &i in currents {
                let s = quadrature(&v, cos_phi, sin_phi);
                let dev = i - gamma.sqrt() * s;
                log_p += log_norm_const - 0.5 * dt * dev * dev;
                v = homodyne_apply(&v, omega, gamma, cos_phi, sin_phi, i, dt, params).0;
            }
        }
        (Outcomes::ComplexCurrents(currents), SchemeKind::Heterodyne) => {
            // Re I ~ N(√γ x/2, 1/(2dt)), Im I ~ N(−√γ y/2, 1/(2dt))
            let log_norm_const = 0.5 * (dt / std::f64::consts::PI).ln();
            for &[re, im] in currents {
                let dev_r = re - 0.5 * gamma.sqrt() * v.x;
                let dev_i = im + 0.5 * gamma.sqrt() * v.y;
                log_p += 2.0 * log_norm_const - dt * (dev_r * dev_r + dev_i * dev_i);
                v = heterodyne_apply(&v, omega, gamma, re, im, dt, params).0;
            }
        }
        _ => panic!("payload does not match scheme"),
    }
    log_p
}

/// Log-probability (density) of `record` under the filter's ostensible
/// measure: clicks as Bernoulli(ε·dt), currents as mean-zero Gaussians.
pub fn ostensible_log_prob(record: &MeasurementRecord, epsilon: f64) -> f64 {
    let dt = record.dt;
    match &record.outcomes {
        Outcomes::Jumps(dn) => {
            let clicks = dn.iter().filter(|&&b| b == 1).count() as f64;
            let silences = dn.len() as f64 - clicks;
            clicks * (epsilon * dt).ln() + silences * (1.0 - epsilon * dt).ln()
        }
        Outcomes::Currents(currents) => {
            let log_norm_const = 0.5 * (dt / std::f64::consts::TAU).ln();
            currents
                .iter()
                .map(|&i| log_norm_const - 0.5 * dt * i * i)
                .sum()
        }
        Outcomes::ComplexCurrents(currents) => {
            let log_norm_const = 0.5 * (dt / std::f64::consts::PI).ln();
            currents
                .iter()
                .map(|&[re, im]| 2.0 * log_norm_const - dt * (re * re + im * im))
                .sum()
        }
    }
}
