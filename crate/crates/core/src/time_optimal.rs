//! Minimum-time steering under `|ε(t)| ≤ ε_max`.
//!
//! Maximising the control Hamiltonian pins the amplitude at `ε_max` and
//! aligns the drive phase with the costate, which rotates at `−ω`:
//! `φ(t) = θ − ωt`. In the frame co-rotating with the free resonator the
//! drive is then a constant phasor and the set reachable at time `t` is the
//! disk of radius `r(t) = (2ε_max/κ)(1 − e^{−κt/2})` centred on the free
//! evolution `e^{λt}α₀`. The minimal time is the first instant the target
//! enters that disk; `θ` follows from matching the phase on its rim.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PulseError, Result};
use crate::lin_control::SystemMatrix;
use crate::model::ComplexAmplitude;
use crate::pulse::Pulse;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeOptimalSolution {
    pub t_f_min: f64,
    /// Drive phase offset in [0, 2π).
    pub theta: f64,
    pub eps_max: f64,
    pub reachable: bool,
}

/// Phase law `φ(t) = θ − ωt` (not wrapped).
pub fn optimal_phase(sys: &SystemMatrix, theta: f64, t: f64) -> f64 {
    theta - sys.rotation_rate * t
}

/// Radius `(2ε_max/κ)(1 − e^{−κt/2})` of the reachable disk.
pub fn reachable_radius(sys: &SystemMatrix, eps_max: f64, t: f64) -> f64 {
    -2.0 * eps_max / sys.kappa * (-0.5 * sys.kappa * t).exp_m1()
}

fn wrap(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// θ that lands the constant-modulus drive exactly on `alpha_f` at `t`.
fn matching_phase(sys: &SystemMatrix, alpha0: ComplexAmplitude, alpha_f: ComplexAmplitude, t: f64) -> f64 {
    // α(t) = e^{λt}α₀ − r(t) e^{i(θ − ωt)}
    let gap = alpha_f - (sys.eigenvalue() * t).exp() * alpha0;
    wrap((-gap).arg() + sys.rotation_rate * t)
}

fn unreachable(eps_max: f64) -> TimeOptimalSolution {
    TimeOptimalSolution {
        t_f_min: f64::INFINITY,
        theta: 0.0,
        eps_max,
        reachable: false,
    }
}

pub fn min_time(
    sys: &SystemMatrix,
    alpha0: ComplexAmplitude,
    alpha_f: ComplexAmplitude,
    eps_max: f64,
) -> Result<TimeOptimalSolution> {
    if !(eps_max.is_finite() && eps_max > 0.0) {
        return Err(invalid(format!("eps_max must be positive, got {eps_max}")));
    }
    if (alpha_f - alpha0).norm() == 0.0 {
        return Err(invalid("target equals the initial state; no transfer needed"));
    }
    let kappa = sys.kappa;

    if alpha0.norm() == 0.0 {
        let ratio = kappa * alpha_f.norm() / (2.0 * eps_max);
        if ratio >= 1.0 {
            return Ok(unreachable(eps_max));
        }
        let t = -2.0 / kappa * (-ratio).ln_1p();
        return Ok(TimeOptimalSolution {
            t_f_min: t,
            theta: matching_phase(sys, alpha0, alpha_f, t),
            eps_max,
            reachable: true,
        });
    }

    // Signed margin: positive once the target lies inside the reachable disk.
    let margin = |t: f64| {
        let centre = (sys.eigenvalue() * t).exp() * alpha0;
        reachable_radius(sys, eps_max, t) - (alpha_f - centre).norm()
    };
    let scale = (alpha_f.norm() + alpha0.norm()).max(1e-300);

    // Past this horizon both the disk and the free evolution have settled to
    // within 1e-12 of their limits.
    let horizon = 2.0 * (1e12f64).ln() / kappa;
    let mut h = 0.02 / kappa;
    if sys.rotation_rate != 0.0 {
        h = h.min(PI / (8.0 * sys.rotation_rate.abs()));
    }
    // first-crossing scan
    let mut prev_t = 0.0;
    let steps = (horizon / h).ceil() as usize;
    let mut bracket = None;
    for k in 1..=steps {
        let t = (k as f64 * h).min(horizon);
        let m = margin(t);
        if m >= 0.0 {
            bracket = Some((prev_t, t));
            break;
        }
        prev_t = t;
    }
    let Some((lo, hi)) = bracket else {
        return Ok(unreachable(eps_max));
    };

    // Solve in units of 1/κ so that the tolerance applies to both axes.
    let mut conv = SimpleConvergency {
        eps: 1e-15,
        max_iter: 200,
    };
    let s = find_root_brent(lo * kappa, hi * kappa, |s: f64| margin(s / kappa) / scale, &mut conv)
        .map_err(|e| PulseError::Degenerate(format!("minimum-time root search failed: {e:?}")))?;
    let t = s / kappa;
    Ok(TimeOptimalSolution {
        t_f_min: t,
        theta: matching_phase(sys, alpha0, alpha_f, t),
        eps_max,
        reachable: true,
    })
}

pub fn synth_time_optimal(sol: &TimeOptimalSolution, sys: &SystemMatrix) -> Result<Pulse> {
    if !sol.reachable {
        return Err(PulseError::Unreachable(format!(
            "no constant-modulus drive of {:e} 1/s reaches the target",
            sol.eps_max
        )));
    }
    if !(sol.t_f_min > 0.0 && sol.t_f_min.is_finite()) {
        return Err(invalid("time-optimal solution has non-positive duration"));
    }
    Ok(Pulse::TimeOptimal {
        eps_max: sol.eps_max,
        theta: sol.theta,
        rotation_rate: sys.rotation_rate,
        t_f: sol.t_f_min,
    })
}

/// Drive strength whose minimal time from rest to `|alpha_f|` equals `t_f`.
pub fn eps_max_for_duration(sys: &SystemMatrix, alpha_f_modulus: f64, t_f: f64) -> Result<f64> {
    if !(t_f > 0.0) {
        return Err(invalid("t_f must be positive"));
    }
    Ok(sys.kappa * alpha_f_modulus / (-2.0 * (-0.5 * sys.kappa * t_f).exp_m1()))
}

/// Helper for reporting: the drive phasor `ε_max e^{iθ}` at t = 0.
pub fn initial_drive(sol: &TimeOptimalSolution) -> Complex64 {
    Complex64::from_polar(sol.eps_max, sol.theta)
}
