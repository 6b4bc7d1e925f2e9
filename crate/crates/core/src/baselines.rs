//! Reference drives: the sin² Hahn ramp, its counter-diabatic correction and
//! the adiabatic (steady-state) map they are built around.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::response_exact;
use crate::error::{invalid, PulseError, Result};
use crate::lin_control::SystemMatrix;
use crate::model::ComplexAmplitude;
use crate::pulse::Pulse;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HahnSpec {
    pub omega0: f64,
    pub t_f: f64,
}

pub fn hahn_pulse(spec: &HahnSpec) -> Result<Pulse> {
    if !(spec.t_f > 0.0 && spec.t_f.is_finite()) {
        return Err(invalid(format!("t_f must be positive, got {}", spec.t_f)));
    }
    if !(spec.omega0 >= 0.0 && spec.omega0.is_finite()) {
        return Err(invalid(format!("omega0 must be non-negative, got {}", spec.omega0)));
    }
    Ok(Pulse::Hahn {
        omega0: spec.omega0,
        t_f: spec.t_f,
    })
}

/// Complex gain `G(t_f) = α(t_f)` for a unit-amplitude Hahn ramp from rest.
pub fn hahn_gain(sys: &SystemMatrix, t_f: f64) -> Result<Complex64> {
    let unit = hahn_pulse(&HahnSpec { omega0: 1.0, t_f })?;
    response_exact(sys, &unit, Complex64::new(0.0, 0.0), t_f)
}

/// Amplitude that makes the Hahn ramp end at `|α(t_f)| = alpha_f_modulus`.
///
/// The response is linear in Ω₀, so one unit-amplitude solve fixes it.
pub fn calibrate_hahn(sys: &SystemMatrix, alpha_f_modulus: f64, t_f: f64) -> Result<HahnSpec> {
    if !(alpha_f_modulus >= 0.0 && alpha_f_modulus.is_finite()) {
        return Err(invalid("target modulus must be non-negative"));
    }
    let gain = hahn_gain(sys, t_f)?.norm();
    if gain < 1e-30 {
        return Err(PulseError::Degenerate(format!("Hahn gain |G| = {gain:e} is degenerate")));
    }
    Ok(HahnSpec {
        omega0: alpha_f_modulus / gain,
        t_f,
    })
}

/// Adiabatic amplitude `|α_f| √(ω² + κ²/4)`.
pub fn adiabatic_amplitude(sys: &SystemMatrix, alpha_f_modulus: f64) -> f64 {
    alpha_f_modulus * sys.rotation_rate.hypot(sys.kappa / 2.0)
}

/// Phase of the steady state reached under a real positive drive:
/// `π/2 + atan(κ/2ω)` (for ω > 0).
pub fn steady_state_phase(sys: &SystemMatrix) -> f64 {
    steady_state(Complex64::new(1.0, 0.0), sys).arg()
}

/// Difference between the achieved final phase of a Hahn ramp and the
/// adiabatic phase, wrapped to (−π, π].
pub fn hahn_phase_error(sys: &SystemMatrix, spec: &HahnSpec) -> Result<f64> {
    let reached = response_exact(sys, &hahn_pulse(spec)?, Complex64::new(0.0, 0.0), spec.t_f)?;
    let target = steady_state(Complex64::new(1.0, 0.0), sys);
    Ok((reached * target.conj()).arg())
}

/// `ε_CD = ε − iε̇/(ω − iκ/2)`.
pub fn cd_transform(base: &Pulse, sys: &SystemMatrix) -> Pulse {
    Pulse::Cd {
        base: Box::new(base.clone()),
        rotation_rate: sys.rotation_rate,
        kappa: sys.kappa,
    }
}

/// Fixed point `α_ss = −ε/(κ/2 + iω)` of the driven resonator.
pub fn steady_state(eps: Complex64, sys: &SystemMatrix) -> ComplexAmplitude {
    -eps / Complex64::new(sys.kappa / 2.0, sys.rotation_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lin_control::energy_by_quadrature;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    fn sys() -> SystemMatrix {
        SystemMatrix::new(TAU * 0.3e6, TAU * 1e4).unwrap()
    }

    #[test]
    fn hahn_energy_closed_form() {
        let p = hahn_pulse(&HahnSpec { omega0: 3.0e6, t_f: 4e-6 }).unwrap();
        let q = energy_by_quadrature(&p, 4e-6, 1e-12).unwrap();
        assert_relative_eq!(q, 0.375 * 9e12 * 4e-6, max_relative = 1e-11);
    }

    #[test]
    fn adiabatic_amplitude_value() {
        assert_relative_eq!(adiabatic_amplitude(&sys(), 10.0), 1.88522e7, max_relative = 1e-5);
    }

    #[test]
    fn calibration_is_linear() {
        let s = sys();
        assert_eq!(calibrate_hahn(&s, 0.0, 1e-5).unwrap().omega0, 0.0);
        let a = calibrate_hahn(&s, 3.0, 1e-5).unwrap().omega0;
        let b = calibrate_hahn(&s, 6.0, 1e-5).unwrap().omega0;
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-14);
    }

    #[test]
    fn calibration_approaches_adiabatic_limit() {
        let s = sys();
        let long = calibrate_hahn(&s, 10.0, 1e-3).unwrap();
        assert_relative_eq!(long.omega0, adiabatic_amplitude(&s, 10.0), max_relative = 1e-4);
        assert!(hahn_phase_error(&s, &long).unwrap().abs() < 1e-3);
    }

    #[test]
    fn steady_state_cases() {
        let s = sys();
        assert_eq!(steady_state(Complex64::new(0.0, 0.0), &s), Complex64::new(0.0, 0.0));
        assert_relative_eq!(steady_state_phase(&s), 1.587461, max_relative = 1e-6);
        assert_relative_eq!(
            steady_state_phase(&s),
            PI / 2.0 + (s.kappa / (2.0 * s.rotation_rate)).atan(),
            max_relative = 1e-14
        );
        let still = SystemMatrix::new(0.0, 4.0).unwrap();
        assert_eq!(steady_state(Complex64::new(2.0, 0.0), &still), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn cd_endpoints_and_midpoint() {
        let s = sys();
        let (omega0, t_f) = (adiabatic_amplitude(&s, 10.0), 1e-5);
        let cd = cd_transform(&Pulse::Hahn { omega0, t_f }, &s);
        assert!(cd.eval(0.0).norm() < 1e-6);
        assert!((cd.eval(t_f) - omega0).norm() < 1e-6 * omega0);
        let mid = Complex64::new(omega0 / 2.0, 0.0)
            - Complex64::i() * (omega0 * PI / (2.0 * t_f)) / Complex64::new(s.rotation_rate, -s.kappa / 2.0);
        assert!((cd.eval(t_f / 2.0) - mid).norm() < 1e-9 * mid.norm());
        let flat = Pulse::Constant {
            value: Complex64::new(1.0, 2.0),
            t_f,
        };
        assert_eq!(cd_transform(&flat, &s).eval(3e-6), Complex64::new(1.0, 2.0));
    }
}
