//! Quantum-speed-limit figures of merit for coherent-state transfers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PulseError, Result};
use crate::model::{ComplexAmplitude, Trajectory};
use crate::quadrature::simpson_samples;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// Fubini–Study distance between the end states (rad).
    pub s0: f64,
    /// ∫ΔH dt = ∫|α̇| dt (rad).
    pub mt_integral: f64,
    pub eta: f64,
    pub eta_bound: f64,
}

/// `arccos(|⟨α₀|α_f⟩|) = arccos(e^{−|α_f−α₀|²/2})`.
pub fn geodesic_s0(alpha0: ComplexAmplitude, alpha_f: ComplexAmplitude) -> f64 {
    let d2 = (alpha_f - alpha0).norm_sqr();
    // arccos(y) = 2 asin(√((1−y)/2)), exact near y = 1
    2.0 * (-(-0.5 * d2).exp_m1() / 2.0).sqrt().asin()
}

/// Upper bound `arccos(e^{−|Δα|²/2}) / |Δα|` on the efficiency.
pub fn efficiency_bound(alpha0: ComplexAmplitude, alpha_f: ComplexAmplitude) -> Result<f64> {
    let d = (alpha_f - alpha0).norm();
    if d == 0.0 {
        return Err(PulseError::CoincidentEndpoints);
    }
    Ok(geodesic_s0(alpha0, alpha_f) / d)
}

/// Path length `∫|α̇| dt`; uses exact velocities when the trajectory carries
/// them, second-order finite differences otherwise.
pub fn path_length(traj: &Trajectory) -> f64 {
    let speeds: Vec<f64> = match &traj.velocities {
        Some(v) => v.iter().map(|z| z.norm()).collect(),
        None => finite_difference(&traj.times, &traj.alphas)
            .iter()
            .map(|z| z.norm())
            .collect(),
    };
    simpson_samples(&traj.times, &speeds)
}

fn finite_difference(t: &[f64], a: &[Complex64]) -> Vec<Complex64> {
    let n = t.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if i == 0 {
            (a[1] - a[0]) / (t[1] - t[0])
        } else if i == n - 1 {
            (a[n - 1] - a[n - 2]) / (t[n - 1] - t[n - 2])
        } else {
            let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            (a[i + 1] - a[i]) * (h0 / (h1 * (h0 + h1))) + (a[i] - a[i - 1]) * (h1 / (h0 * (h0 + h1)))
        };
        out.push(d);
    }
    out
}

pub fn efficiency(traj: &Trajectory) -> Result<EfficiencyReport> {
    if traj.len() < 3 {
        return Err(invalid("efficiency needs at least 3 trajectory samples"));
    }
    let (a0, af) = (traj.alphas[0], traj.alphas[traj.len() - 1]);
    let eta_bound = efficiency_bound(a0, af)?;
    let s0 = geodesic_s0(a0, af);
    let mt_integral = path_length(traj);
    if !(mt_integral > 0.0) {
        return Err(PulseError::CoincidentEndpoints);
    }
    Ok(EfficiencyReport {
        s0,
        mt_integral,
        eta: s0 / mt_integral,
        eta_bound,
    })
}
