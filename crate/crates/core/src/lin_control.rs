//! Minimum-energy steering of the damped rotating resonator.
//!
//! The two-quadrature system `ẋ = A x + B u` with
//! `A = [[−κ/2, ω], [−ω, −κ/2]]`, `B = −I` is handled in complex form:
//! `α̇ = λα − ε` with the single eigenvalue `λ = −(κ/2 + iω)`. Because `A`
//! is normal and `B` is a multiple of the identity, the controllability
//! Gramian is the scalar `W(t_f)` times the identity and the PMP/Gramian
//! control collapses to `ε(t) = μ e^{λ*(t_f − t)}` with
//! `μ = [e^{λt_f}α₀ − α_f] / W(t_f)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::response_exact;
use crate::error::{invalid, PulseError, Result};
use crate::model::ComplexAmplitude;
use crate::pulse::{steering_coefficient, Pulse};
use crate::quadrature;

/// Rotation rate (ω_r, or ±χ for a qubit-conditioned resonator) and decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemMatrix {
    pub rotation_rate: f64,
    pub kappa: f64,
}

impl SystemMatrix {
    pub fn new(rotation_rate: f64, kappa: f64) -> Result<Self> {
        if !rotation_rate.is_finite() {
            return Err(invalid("rotation rate must be finite"));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self { rotation_rate, kappa })
    }

    /// λ = −(κ/2 + iω).
    pub fn eigenvalue(&self) -> Complex64 {
        Complex64::new(-self.kappa / 2.0, -self.rotation_rate)
    }

    /// The real 2×2 drift matrix.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (w, h) = (self.rotation_rate, -self.kappa / 2.0);
        [[h, w], [-w, h]]
    }
}

/// Undriven evolution factor `e^{λt}`.
pub fn propagator(sys: &SystemMatrix, t: f64) -> Result<Complex64> {
    if t < 0.0 {
        return Err(PulseError::NegativeTime(t));
    }
    if t.is_infinite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((sys.eigenvalue() * t).exp())
}

/// Scalar controllability Gramian `W = (1 − e^{−κ t_f})/κ` (seconds).
pub fn gramian(sys: &SystemMatrix, t_f: f64) -> Result<f64> {
    if !(t_f > 0.0) {
        return Err(invalid(format!("t_f must be positive, got {t_f}")));
    }
    Ok(-(-sys.kappa * t_f).exp_m1() / sys.kappa)
}

pub fn synth_energy_optimal(
    sys: &SystemMatrix,
    alpha0: ComplexAmplitude,
    alpha_f: ComplexAmplitude,
    t_f: f64,
) -> Result<Pulse> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(invalid(format!("t_f must be positive, got {t_f}")));
    }
    let mu = steering_coefficient(sys, alpha0, alpha_f, t_f);
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(PulseError::NonFinite("energy-optimal pulse coefficient"));
    }
    Ok(Pulse::EnergyOptimal {
        alpha0,
        alpha_f,
        t_f,
        rotation_rate: sys.rotation_rate,
        kappa: sys.kappa,
    })
}

/// Closed-form minimum energy `κ |e^{λt_f}α₀ − α_f|² / (1 − e^{−κt_f})`.
pub fn optimal_energy(sys: &SystemMatrix, alpha0: ComplexAmplitude, alpha_f: ComplexAmplitude, t_f: f64) -> Result<f64> {
    let w = gramian(sys, t_f)?;
    let gap = propagator(sys, t_f)? * alpha0 - alpha_f;
    Ok(gap.norm_sqr() / w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// ∫|ε|² dt in 1/s.
    pub j_e: f64,
    pub t_f: f64,
    /// Relative endpoint miss `|α(t_f) − α_f| / |α_f|`, for pulses that carry a target.
    pub target_residual: Option<f64>,
}

/// Energy `∫₀^{t_f} |ε(t)|² dt`, closed form where the variant admits one.
pub fn energy_cost(pulse: &Pulse, t_f: f64) -> Result<CostReport> {
    if !(t_f >= 0.0 && t_f.is_finite()) {
        return Err(invalid(format!("t_f must be non-negative, got {t_f}")));
    }
    let available = pulse.duration();
    if t_f > available * (1.0 + 1e-12) {
        return Err(PulseError::PulseTooShort {
            available,
            required: t_f,
        });
    }
    let full = (t_f - available).abs() <= 1e-12 * available;
    let mut target_residual = None;
    let j_e = match pulse {
        Pulse::EnergyOptimal {
            alpha0,
            alpha_f,
            rotation_rate,
            kappa,
            t_f: own,
        } if full => {
            let sys = SystemMatrix::new(*rotation_rate, *kappa)?;
            let reached = response_exact(&sys, pulse, *alpha0, *own)?;
            let miss = (reached - alpha_f).norm();
            target_residual = Some(if alpha_f.norm() > 0.0 { miss / alpha_f.norm() } else { miss });
            optimal_energy(&sys, *alpha0, *alpha_f, *own)?
        }
        Pulse::Hahn { omega0, .. } if full => 0.375 * omega0 * omega0 * t_f,
        Pulse::TimeOptimal { eps_max, .. } => eps_max * eps_max * t_f,
        Pulse::Constant { value, .. } => value.norm_sqr() * t_f,
        _ => energy_by_quadrature(pulse, t_f, 1e-9)?,
    };
    Ok(CostReport {
        j_e,
        t_f,
        target_residual,
    })
}

/// Adaptive-Simpson value of `∫₀^{t_f} |ε|² dt`, independent of closed forms.
pub fn energy_by_quadrature(pulse: &Pulse, t_f: f64, rel_tol: f64) -> Result<f64> {
    quadrature::integrate(|t| pulse.eval(t).norm_sqr(), 0.0, t_f, rel_tol)
}

/// Costate `p = p₁ + i p₂` of the PMP, evolving under `ṗ = −Aᵀp`.
///
/// In complex form `ṗ = (κ/2 − iω) p`: the costate rotates at `−ω` and its
/// modulus grows as `e^{κt/2}`, so `|p|² e^{−κt}` is conserved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjointState {
    pub p: Complex64,
}

impl AdjointState {
    pub fn from_phase(magnitude: f64, theta: f64) -> Self {
        Self {
            p: Complex64::from_polar(magnitude, theta),
        }
    }

    /// Right-hand side `−Aᵀp` in complex form.
    pub fn rate(&self, sys: &SystemMatrix) -> Complex64 {
        let a = sys.matrix();
        let (p1, p2) = (self.p.re, self.p.im);
        Complex64::new(-(a[0][0] * p1 + a[1][0] * p2), -(a[0][1] * p1 + a[1][1] * p2))
    }

    /// Exact flow over `t`.
    pub fn evolve(&self, sys: &SystemMatrix, t: f64) -> Self {
        Self {
            p: self.p * (-sys.eigenvalue().conj() * t).exp(),
        }
    }

    /// `|p|² e^{−κt}`, constant along the flow.
    pub fn conserved(&self, sys: &SystemMatrix, t: f64) -> f64 {
        self.p.norm_sqr() * (-sys.kappa * t).exp()
    }

    pub fn phase(&self) -> f64 {
        self.p.arg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn fig2() -> SystemMatrix {
        SystemMatrix::new(TAU * 0.3e6, TAU * 1e4).unwrap()
    }

    #[test]
    fn propagator_cases() {
        let sys = fig2();
        assert_eq!(propagator(&sys, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let period = TAU / sys.rotation_rate;
        let e = propagator(&sys, period).unwrap();
        assert_relative_eq!(e.re, 0.90058, max_relative = 1e-5);
        assert!(e.im.abs() < 1e-12);
        assert_eq!(propagator(&sys, f64::INFINITY).unwrap().norm(), 0.0);
        assert!(matches!(propagator(&sys, -1e-9), Err(PulseError::NegativeTime(_))));
    }

    #[test]
    fn gramian_values_and_limits() {
        let sys = fig2();
        assert_relative_eq!(gramian(&sys, 1e-5).unwrap(), 7.4249e-6, max_relative = 1e-4);
        assert_relative_eq!(gramian(&sys, 1e-12).unwrap(), 1e-12, max_relative = 1e-7);
        assert_relative_eq!(gramian(&sys, 1.0).unwrap(), 1.0 / sys.kappa, max_relative = 1e-12);
        assert!(gramian(&sys, 0.0).is_err());
    }

    #[test]
    fn zero_endpoints_give_zero_pulse() {
        let z = Complex64::new(0.0, 0.0);
        let p = synth_energy_optimal(&fig2(), z, z, 1e-5).unwrap();
        assert_eq!(p.eval(3e-6), z);
        assert_eq!(energy_cost(&p, 1e-5).unwrap().j_e, 0.0);
    }

    #[test]
    fn fig2_energy_optimal_pulse_values() {
        let sys = fig2();
        let target = Complex64::from_polar(10.0, 1.587461);
        let p = synth_energy_optimal(&sys, Complex64::new(0.0, 0.0), target, 1e-5).unwrap();
        assert_relative_eq!(p.eval(0.0).norm(), 9.838e5, max_relative = 1e-3);
        assert_relative_eq!(p.eval(1e-5).norm(), 1.3468e6, max_relative = 1e-4);
        let cost = energy_cost(&p, 1e-5).unwrap();
        assert_relative_eq!(cost.j_e, 1.3468e7, max_relative = 1e-4);
        assert!(cost.target_residual.unwrap() < 1e-12);
    }

    #[test]
    fn time_optimal_cost_is_constant_modulus() {
        let p = Pulse::TimeOptimal {
            eps_max: 1e7,
            theta: 0.3,
            rotation_rate: 1.0e6,
            t_f: 1.01606e-6,
        };
        assert_relative_eq!(energy_cost(&p, 1.01606e-6).unwrap().j_e, 1.0161e8, max_relative = 1e-4);
    }

    #[test]
    fn cost_rejects_short_pulse() {
        let p = Pulse::Hahn { omega0: 1.0, t_f: 1.0 };
        assert!(matches!(energy_cost(&p, 2.0), Err(PulseError::PulseTooShort { .. })));
    }

    #[test]
    fn adjoint_rate_matches_complex_form() {
        let sys = fig2();
        let s = AdjointState::from_phase(1.3, 0.7);
        let expected = Complex64::new(sys.kappa / 2.0, -sys.rotation_rate) * s.p;
        assert!((s.rate(&sys) - expected).norm() < 1e-9 * expected.norm());
    }
}
