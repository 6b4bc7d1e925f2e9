//! Analytic drive-envelope descriptors.
//!
//! A [`Pulse`] is a tagged description of a complex envelope ε(t) on
//! `[0, t_f]`, evaluable at any time. All analytic variants are finite sums
//! of complex exponentials `Σ aₖ e^{sₖ t}`; [`Pulse::exp_terms`] exposes that
//! form so responses and integrals can be computed in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lin_control::SystemMatrix;

/// One term `amplitude · e^{rate · t}` of an exponential-sum envelope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTerm {
    pub amplitude: Complex64,
    pub rate: Complex64,
}

impl ExpTerm {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.amplitude * (self.rate * t).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "parameters", rename_all = "snake_case")]
pub enum Pulse {
    /// Minimum-energy steering pulse `μ e^{λ*(t_f−t)}`, λ = −(κ/2 + iω).
    EnergyOptimal {
        alpha0: Complex64,
        alpha_f: Complex64,
        t_f: f64,
        rotation_rate: f64,
        kappa: f64,
    },
    /// Constant-modulus drive `ε_max e^{i(θ − ωt)}`.
    TimeOptimal {
        eps_max: f64,
        theta: f64,
        rotation_rate: f64,
        t_f: f64,
    },
    /// Real sin² ramp `Ω₀ sin²(πt/2t_f)`.
    Hahn { omega0: f64, t_f: f64 },
    Constant { value: Complex64, t_f: f64 },
    /// Counter-diabatic correction `ε − iε̇/(ω − iκ/2)` of `base`.
    Cd {
        base: Box<Pulse>,
        rotation_rate: f64,
        kappa: f64,
    },
    /// Linearly interpolated samples.
    Sampled {
        times: Vec<f64>,
        values: Vec<Complex64>,
    },
}

impl Pulse {
    pub fn zero(t_f: f64) -> Self {
        Pulse::Constant {
            value: Complex64::new(0.0, 0.0),
            t_f,
        }
    }

    pub fn sampled(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(invalid("sampled pulse needs ≥ 2 matching times and values"));
        }
        if times[0] > 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("sampled pulse times must start at ≤ 0 and increase strictly"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("sampled pulse contains non-finite values"));
        }
        Ok(Pulse::Sampled { times, values })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Pulse::EnergyOptimal { .. } => "energy_optimal",
            Pulse::TimeOptimal { .. } => "time_optimal",
            Pulse::Hahn { .. } => "hahn",
            Pulse::Constant { .. } => "constant",
            Pulse::Cd { .. } => "cd",
            Pulse::Sampled { .. } => "sampled",
        }
    }

    /// End of the interval on which the pulse is defined.
    pub fn duration(&self) -> f64 {
        match self {
            Pulse::EnergyOptimal { t_f, .. }
            | Pulse::TimeOptimal { t_f, .. }
            | Pulse::Hahn { t_f, .. }
            | Pulse::Constant { t_f, .. } => *t_f,
            Pulse::Cd { base, .. } => base.duration(),
            Pulse::Sampled { times, .. } => *times.last().unwrap_or(&0.0),
        }
    }

    /// ε(t).
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Pulse::EnergyOptimal {
                alpha0,
                alpha_f,
                t_f,
                rotation_rate,
                kappa,
            } => {
                let sys = SystemMatrix {
                    rotation_rate: *rotation_rate,
                    kappa: *kappa,
                };
                let mu = steering_coefficient(&sys, *alpha0, *alpha_f, *t_f);
                mu * (sys.eigenvalue().conj() * (t_f - t)).exp()
            }
            Pulse::TimeOptimal {
                eps_max,
                theta,
                rotation_rate,
                ..
            } => Complex64::from_polar(*eps_max, theta - rotation_rate * t),
            Pulse::Hahn { omega0, t_f } => {
                let s = (PI * t / (2.0 * t_f)).sin();
                Complex64::new(omega0 * s * s, 0.0)
            }
            Pulse::Constant { value, .. } => *value,
            Pulse::Cd {
                base,
                rotation_rate,
                kappa,
            } => base.eval(t) + cd_coefficient(*rotation_rate, *kappa) * base.derivative(t),
            Pulse::Sampled { times, values } => interpolate(times, values, t),
        }
    }

    /// ε̇(t): closed form for analytic variants, central differences otherwise.
    pub fn derivative(&self, t: f64) -> Complex64 {
        match self.exp_terms() {
            Some(terms) => terms.iter().map(|k| k.rate * k.eval(t)).sum(),
            None => self.central_difference(t),
        }
    }

    fn central_difference(&self, t: f64) -> Complex64 {
        let h = match self {
            Pulse::Sampled { times, .. } => {
                let span = times[times.len() - 1] - times[0];
                span / (times.len() - 1) as f64
            }
            other => other.duration() * 1e-6,
        };
        let (lo, hi) = match self {
            Pulse::Sampled { times, .. } => (times[0], times[times.len() - 1]),
            other => (0.0, other.duration()),
        };
        let a = (t - h).max(lo);
        let b = (t + h).min(hi);
        if b <= a {
            return Complex64::new(0.0, 0.0);
        }
        (self.eval(b) - self.eval(a)) / (b - a)
    }

    /// Exponential-sum form of the envelope, or `None` for sampled data.
    pub fn exp_terms(&self) -> Option<Vec<ExpTerm>> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Pulse::EnergyOptimal {
                alpha0,
                alpha_f,
                t_f,
                rotation_rate,
                kappa,
            } => {
                let sys = SystemMatrix {
                    rotation_rate: *rotation_rate,
                    kappa: *kappa,
                };
                let lam_c = sys.eigenvalue().conj();
                let mu = steering_coefficient(&sys, *alpha0, *alpha_f, *t_f);
                Some(vec![ExpTerm {
                    amplitude: mu * (lam_c * t_f).exp(),
                    rate: -lam_c,
                }])
            }
            Pulse::TimeOptimal {
                eps_max,
                theta,
                rotation_rate,
                ..
            } => Some(vec![ExpTerm {
                amplitude: Complex64::from_polar(*eps_max, *theta),
                rate: Complex64::new(0.0, -rotation_rate),
            }]),
            Pulse::Hahn { omega0, t_f } => {
                // sin²(x) = 1/2 − (e^{2ix} + e^{−2ix})/4
                let w = PI / t_f;
                Some(vec![
                    ExpTerm {
                        amplitude: Complex64::new(omega0 / 2.0, 0.0),
                        rate: zero,
                    },
                    ExpTerm {
                        amplitude: Complex64::new(-omega0 / 4.0, 0.0),
                        rate: Complex64::new(0.0, w),
                    },
                    ExpTerm {
                        amplitude: Complex64::new(-omega0 / 4.0, 0.0),
                        rate: Complex64::new(0.0, -w),
                    },
                ])
            }
            Pulse::Constant { value, .. } => Some(vec![ExpTerm {
                amplitude: *value,
                rate: zero,
            }]),
            Pulse::Cd {
                base,
                rotation_rate,
                kappa,
            } => {
                let c = cd_coefficient(*rotation_rate, *kappa);
                base.exp_terms().map(|terms| {
                    terms
                        .into_iter()
                        .map(|k| ExpTerm {
                            amplitude: k.amplitude * (1.0 + k.rate * c),
                            rate: k.rate,
                        })
                        .collect()
                })
            }
            Pulse::Sampled { .. } => None,
        }
    }

    /// Samples `n + 1` evenly spaced points on `[0, duration]`.
    pub fn sample(&self, n: usize) -> Vec<(f64, Complex64)> {
        let t_f = self.duration();
        (0..=n)
            .map(|k| {
                let t = t_f * k as f64 / n as f64;
                (t, self.eval(t))
            })
            .collect()
    }
}

/// μ = [e^{λt_f}α₀ − α_f] / W(t_f), the constant of the min-norm pulse.
pub(crate) fn steering_coefficient(sys: &SystemMatrix, alpha0: Complex64, alpha_f: Complex64, t_f: f64) -> Complex64 {
    let gap = (sys.eigenvalue() * t_f).exp() * alpha0 - alpha_f;
    let w = -(-sys.kappa * t_f).exp_m1() / sys.kappa;
    gap / w
}

/// 1/(κ/2 + iω), which equals −i/(ω − iκ/2).
pub(crate) fn cd_coefficient(rotation_rate: f64, kappa: f64) -> Complex64 {
    Complex64::new(kappa / 2.0, rotation_rate).inv()
}

fn interpolate(times: &[f64], values: &[Complex64], t: f64) -> Complex64 {
    if t <= times[0] {
        return values[0];
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return values[last];
    }
    let i = times.partition_point(|&x| x <= t) - 1;
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] * (1.0 - w) + values[i + 1] * w
}
