//! Trajectory generation for `α̇ = −i(ω + K|α|²)α − (κ/2)α − ε(t)`.
//!
//! [`integrate`] is a fixed-step fourth-order Runge–Kutta scheme in
//! integrating-factor (Lawson) form: the linear part `λα` is propagated
//! exactly by `e^{λh}` and RK4 handles only the drive and the Kerr term.
//! Step count is fixed up front, so results are bit-reproducible.
//!
//! [`response_exact`] evaluates the variation-of-constants solution in
//! closed form for every pulse that is a finite exponential sum.

mod fock;

pub use fock::{fock_oracle, fock_oracle_from, FockRun, FockState};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, PulseError, Result};
use crate::lin_control::SystemMatrix;
use crate::model::{ComplexAmplitude, SimOptions, Trajectory};
use crate::pulse::{ExpTerm, Pulse};

const STEPS_PER_PERIOD: f64 = 50.0;
const MIN_STEPS: f64 = 2000.0;

/// Default step `min(2π/(50|ω|), t_f/2000)`.
pub fn default_step(sys: &SystemMatrix, t_f: f64) -> f64 {
    let by_duration = t_f / MIN_STEPS;
    if sys.rotation_rate == 0.0 {
        by_duration
    } else {
        (TAU / (STEPS_PER_PERIOD * sys.rotation_rate.abs())).min(by_duration)
    }
}

pub(crate) fn step_count(t_f: f64, dt: f64) -> usize {
    ((t_f / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

pub(super) fn check_span(pulse: &Pulse, t_f: f64) -> Result<()> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(invalid(format!("t_f must be positive, got {t_f}")));
    }
    let available = pulse.duration();
    if t_f > available * (1.0 + 1e-12) {
        return Err(PulseError::PulseTooShort {
            available,
            required: t_f,
        });
    }
    Ok(())
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn integrate(
    sys: &SystemMatrix,
    pulse: &Pulse,
    alpha0: ComplexAmplitude,
    t_f: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    check_span(pulse, t_f)?;
    let dt = opts.dt.unwrap_or_else(|| default_step(sys, t_f));
    if dt >= t_f {
        return Err(invalid(format!("dt = {dt:e} s is not smaller than t_f = {t_f:e} s")));
    }
    let n = step_count(t_f, dt);
    let h = t_f / n as f64;

    let lam = sys.eigenvalue();
    let kerr = opts.kerr_k;
    let full = (lam * h).exp();
    let half = (lam * (0.5 * h)).exp();
    let i = Complex64::i();
    let forcing = |t: f64, a: Complex64| -> Result<Complex64> {
        let eps = pulse.eval(t);
        if !finite(eps) {
            return Err(PulseError::NonFinite("pulse"));
        }
        Ok(-i * kerr * a.norm_sqr() * a - eps)
    };

    let mut times = Vec::with_capacity(n + 1);
    let mut alphas = Vec::with_capacity(n + 1);
    let mut velocities = Vec::with_capacity(n + 1);
    let mut a = alpha0;
    let mut k1 = forcing(0.0, a)?;
    times.push(0.0);
    alphas.push(a);
    velocities.push(lam * a + k1);

    for step in 0..n {
        let t = step as f64 * h;
        let k2 = forcing(t + 0.5 * h, half * (a + 0.5 * h * k1))?;
        let k3 = forcing(t + 0.5 * h, half * a + 0.5 * h * k2)?;
        let k4 = forcing(t + h, full * a + h * half * k3)?;
        a = full * a + h / 6.0 * (full * k1 + 2.0 * half * (k2 + k3) + k4);
        if !finite(a) {
            return Err(PulseError::NonFinite("trajectory"));
        }
        let t_next = if step + 1 == n { t_f } else { (step + 1) as f64 * h };
        k1 = forcing(t_next, a)?;
        times.push(t_next);
        alphas.push(a);
        velocities.push(lam * a + k1);
    }

    Trajectory::new(times, alphas)?.with_velocities(velocities)
}

/// `(e^z − 1)/z`, accurate near zero.
pub(crate) fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    } else {
        (z.exp() - 1.0) / z
    }
}

fn terms_of(pulse: &Pulse) -> Result<Vec<ExpTerm>> {
    pulse
        .exp_terms()
        .ok_or(PulseError::UnsupportedVariant(pulse.name()))
}

/// Driven part `∫₀ᵗ e^{λ(t−s)} a e^{rs} ds = a t e^{λt} φ₁((r−λ)t)`.
fn convolved(lam: Complex64, term: &ExpTerm, t: f64) -> Complex64 {
    term.amplitude * t * (lam * t).exp() * phi1((term.rate - lam) * t)
}

/// Closed-form α(t) for pulses that are exponential sums.
pub fn response_exact(sys: &SystemMatrix, pulse: &Pulse, alpha0: ComplexAmplitude, t: f64) -> Result<ComplexAmplitude> {
    if t < 0.0 {
        return Err(PulseError::NegativeTime(t));
    }
    let lam = sys.eigenvalue();
    let terms = terms_of(pulse)?;
    let driven: Complex64 = terms.iter().map(|k| convolved(lam, k, t)).sum();
    Ok((lam * t).exp() * alpha0 - driven)
}

/// Samples the closed-form solution on `times`, velocities included.
pub fn trajectory_exact(sys: &SystemMatrix, pulse: &Pulse, alpha0: ComplexAmplitude, times: &[f64]) -> Result<Trajectory> {
    let lam = sys.eigenvalue();
    let terms = terms_of(pulse)?;
    let mut alphas = Vec::with_capacity(times.len());
    let mut vel = Vec::with_capacity(times.len());
    for &t in times {
        if t < 0.0 {
            return Err(PulseError::NegativeTime(t));
        }
        let driven: Complex64 = terms.iter().map(|k| convolved(lam, k, t)).sum();
        let a = (lam * t).exp() * alpha0 - driven;
        alphas.push(a);
        vel.push(lam * a - pulse.eval(t));
    }
    Trajectory::new(times.to_vec(), alphas)?.with_velocities(vel)
}

/// Closed-form `∫₀^τ α(t) dt`.
pub fn response_integral_exact(
    sys: &SystemMatrix,
    pulse: &Pulse,
    alpha0: ComplexAmplitude,
    tau: f64,
) -> Result<Complex64> {
    if tau < 0.0 {
        return Err(PulseError::NegativeTime(tau));
    }
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lam = sys.eigenvalue();
    let free = alpha0 * tau * phi1(lam * tau);
    let mut driven = Complex64::new(0.0, 0.0);
    for k in terms_of(pulse)? {
        let d = k.rate - lam;
        if (d * tau).norm() >= 1e-3 {
            // ∫ (e^{rt} − e^{λt})/d dt
            driven += k.amplitude * tau * (phi1(k.rate * tau) - phi1(lam * tau)) / d;
        } else {
            driven += gauss_legendre(|t| convolved(lam, &k, t), tau, (lam.norm() * tau).ceil() as usize + 1);
        }
    }
    Ok(free - driven)
}

/// Composite 8-point Gauss–Legendre on `[0, b]`.
fn gauss_legendre<F: Fn(f64) -> Complex64>(f: F, b: f64, panels: usize) -> Complex64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let h = b / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            acc += w * (f(mid - 0.5 * h * x) + f(mid + 0.5 * h * x));
        }
    }
    acc * 0.5 * h
}
