//! Shared test helper: deterministically replay a measurement record
//! through the same per-step maps the generator used.

use bloch_core::{BlochState, SystemParams};
use trajectory_engine::diffusive::{heterodyne_apply, homodyne_apply};
use trajectory_engine::jump::{collapse_map, no_jump_map};
use trajectory_engine::{MeasurementRecord, Outcomes, SchemeKind};

/// Runs the recorded outcomes forward from `initial` and returns the final
/// conditioned state. Because the generator applies exactly these maps to
/// exactly these inputs, the result must match the generator bit for bit.
pub fn replay(record: &MeasurementRecord, initial: BlochState, params: &SystemParams) -> BlochState {
    let dt = record.dt;
    let gamma = params.gamma;
    let omega = record.omega_true;
    let mut v = initial;
    match (&record.outcomes, record.scheme.kind) {
        (Outcomes::Jumps(dn), SchemeKind::Direct) => {
            for &bit in dn {
                v = if bit == 1 {
                    collapse_map(&v, 0.0)
                } else {
                    no_jump_map(&v, omega, 0.0, gamma, dt).0
                };
            }
        }
        (Outcomes::Jumps(dn), SchemeKind::Adaptive) => {
            for (k, &bit) in dn.iter().enumerate() {
                let mu = f64::from(record.mu_history[k]) * record.scheme.mu_magnitude;
                v = if bit == 1 {
                    collapse_map(&v, mu)
                } else {
                    no_jump_map(&v, omega, mu, gamma, dt).0
                };
            }
        }
        (Outcomes::Currents(currents), SchemeKind::HomodyneX | SchemeKind::HomodyneY) => {
            let (cos_phi, sin_phi) = record.scheme.lo_components();
            for &i in currents {
                v = homodyne_apply(&v, omega, gamma, cos_phi, sin_phi, i, dt, params).0;
            }
        }
        (Outcomes::ComplexCurrents(currents), SchemeKind::Heterodyne) => {
            for &[re, im] in currents {
                v = heterodyne_apply(&v, omega, gamma, re, im, dt, params).0;
            }
        }
        _ => panic!("payload does not match scheme {}", record.scheme.kind),
    }
    v
}
