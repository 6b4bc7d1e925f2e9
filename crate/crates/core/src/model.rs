//! Physical parameters, unit handling and the value types shared by every
//! other module.
//!
//! Everything inside the crate is angular: frequencies and rates are rad/s,
//! times are seconds. Conversion from cyclic (Hz) inputs happens once, at
//! construction, through [`FrequencyUnit`].

use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lin_control::SystemMatrix;

/// Complex cavity amplitude α = x₁ + i x₂ (dimensionless).
pub type ComplexAmplitude = Complex64;

/// Unit tag carried by every frequency-like configuration field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyUnit {
    /// Ordinary frequency in Hz; multiplied by 2π on input.
    Cyclic,
    /// Already in rad/s (or 1/s for rates).
    #[default]
    Angular,
}

impl FrequencyUnit {
    pub fn to_angular(self, value: f64) -> f64 {
        match self {
            FrequencyUnit::Cyclic => value * TAU,
            FrequencyUnit::Angular => value,
        }
    }

    pub fn from_angular(self, value: f64) -> f64 {
        match self {
            FrequencyUnit::Cyclic => value / TAU,
            FrequencyUnit::Angular => value,
        }
    }
}

impl std::str::FromStr for FrequencyUnit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cyclic" | "hz" => Ok(FrequencyUnit::Cyclic),
            "angular" | "rad/s" => Ok(FrequencyUnit::Angular),
            other => Err(format!("unknown unit `{other}` (expected cyclic|angular)")),
        }
    }
}

/// Bare resonator: frequency and energy decay rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_r: f64,
    pub kappa: f64,
}

impl SystemParams {
    /// Validated constructor; both arguments in angular units.
    pub fn new(omega_r: f64, kappa: f64) -> Result<Self> {
        if !omega_r.is_finite() {
            return Err(invalid(format!("omega_r must be finite, got {omega_r}")));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self { omega_r, kappa })
    }

    pub fn with_unit(omega_r: f64, kappa: f64, unit: FrequencyUnit) -> Result<Self> {
        Self::new(unit.to_angular(omega_r), unit.to_angular(kappa))
    }

    pub fn system_matrix(&self) -> SystemMatrix {
        SystemMatrix {
            rotation_rate: self.omega_r,
            kappa: self.kappa,
        }
    }
}

/// Resonator dispersively coupled to a qubit.
///
/// `chi` and `n_crit` are derived at construction and kept consistent with
/// the primary fields; use [`DispersiveParams::new`] to build one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveParams {
    pub omega_r: f64,
    pub omega_q: f64,
    pub g: f64,
    pub kappa: f64,
    chi: f64,
    n_crit: f64,
}

impl DispersiveParams {
    pub fn new(omega_r: f64, omega_q: f64, g: f64, kappa: f64) -> Result<Self> {
        for (name, v) in [("omega_r", omega_r), ("omega_q", omega_q), ("g", g)] {
            if !v.is_finite() {
                return Err(invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid(format!("kappa must be positive, got {kappa}")));
        }
        if g == 0.0 {
            return Err(invalid("coupling g must be non-zero"));
        }
        let delta = omega_q - omega_r;
        if delta == 0.0 {
            return Err(invalid("omega_q equals omega_r: dispersive shift is singular"));
        }
        let chi = g * g / delta;
        let n_crit = delta * delta / (4.0 * g * g);
        if !(chi.is_finite() && n_crit.is_finite() && n_crit > 0.0) {
            return Err(invalid("derived chi / n_crit not finite"));
        }
        Ok(Self {
            omega_r,
            omega_q,
            g,
            kappa,
            chi,
            n_crit,
        })
    }

    pub fn with_unit(omega_r: f64, omega_q: f64, g: f64, kappa: f64, unit: FrequencyUnit) -> Result<Self> {
        Self::new(
            unit.to_angular(omega_r),
            unit.to_angular(omega_q),
            unit.to_angular(g),
            unit.to_angular(kappa),
        )
    }

    /// Chooses g so that (ω_q−ω_r)²/4g² equals `n_crit`.
    pub fn for_critical_photon_number(n_crit: f64, omega_r: f64, omega_q: f64, kappa: f64) -> Result<Self> {
        if !(n_crit.is_finite() && n_crit > 0.0) {
            return Err(invalid(format!("n_crit must be positive, got {n_crit}")));
        }
        let g = (omega_q - omega_r).abs() / (2.0 * n_crit.sqrt());
        Self::new(omega_r, omega_q, g, kappa)
    }

    /// Same coupling and decay, different bare frequencies.
    pub fn with_frequencies(&self, omega_r: f64, omega_q: f64) -> Result<Self> {
        Self::new(omega_r, omega_q, self.g, self.kappa)
    }

    pub fn detuning(&self) -> f64 {
        self.omega_q - self.omega_r
    }

    /// Dispersive shift χ = g²/(ω_q−ω_r).
    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn n_crit(&self) -> f64 {
        self.n_crit
    }

    /// Resonator seen by the qubit in state |e⟩ (`sign = +1`) or |g⟩ (`-1`).
    pub fn conditioned(&self, sign: f64) -> SystemMatrix {
        SystemMatrix {
            rotation_rate: sign * self.chi,
            kappa: self.kappa,
        }
    }
}

/// Sampled evolution of the cavity amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub alphas: Vec<ComplexAmplitude>,
    /// α̇ on the same grid, when the producer knows it exactly.
    pub velocities: Option<Vec<Complex64>>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, alphas: Vec<ComplexAmplitude>) -> Result<Self> {
        if times.len() != alphas.len() {
            return Err(invalid(format!(
                "trajectory length mismatch: {} times, {} amplitudes",
                times.len(),
                alphas.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("trajectory times must be strictly increasing"));
        }
        Ok(Self {
            times,
            alphas,
            velocities: None,
        })
    }

    pub fn with_velocities(mut self, velocities: Vec<Complex64>) -> Result<Self> {
        if velocities.len() != self.times.len() {
            return Err(invalid("velocity samples do not match the time grid"));
        }
        self.velocities = Some(velocities);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Photon number |α|² at each sample.
    pub fn photon(&self) -> Vec<f64> {
        self.alphas.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn first(&self) -> Option<ComplexAmplitude> {
        self.alphas.first().copied()
    }

    pub fn last(&self) -> Option<ComplexAmplitude> {
        self.alphas.last().copied()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Keeps roughly `points` evenly strided samples, always including both ends.
    pub fn decimate(&self, points: usize) -> Trajectory {
        let n = self.len();
        if points < 2 || n <= points {
            return self.clone();
        }
        let idx: Vec<usize> = (0..points)
            .map(|k| ((k as f64) * ((n - 1) as f64) / ((points - 1) as f64)).round() as usize)
            .collect();
        Trajectory {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            alphas: idx.iter().map(|&i| self.alphas[i]).collect(),
            velocities: self
                .velocities
                .as_ref()
                .map(|v| idx.iter().map(|&i| v[i]).collect()),
        }
    }

    /// CSV with columns `t_s,re_alpha,im_alpha,photon`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t_s,re_alpha,im_alpha,photon")?;
        for (t, a) in self.times.iter().zip(&self.alphas) {
            writeln!(w, "{:e},{:e},{:e},{:e}", t, a.re, a.im, a.norm_sqr())?;
        }
        Ok(())
    }
}

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Fixed step; `None` selects min(2π/(50|ω|), t_f/2000).
    pub dt: Option<f64>,
    pub rel_tol: f64,
    /// Semiclassical Kerr coefficient (rad/s per photon).
    pub kerr_k: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dt: None,
            rel_tol: 1e-9,
            kerr_k: 0.0,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(invalid(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(invalid(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !self.kerr_k.is_finite() {
            return Err(invalid("kerr_k must be finite"));
        }
        Ok(())
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_kerr(mut self, kerr_k: f64) -> Self {
        self.kerr_k = kerr_k;
        self
    }
}

/// On-disk configuration: `{omega_r, omega_q, g, kappa, unit}`.
///
/// `omega_q` and `g` are only needed for dispersive (readout) runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub omega_r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub kappa: f64,
    #[serde(default)]
    pub unit: FrequencyUnit,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: Config = serde_json::from_str(&text)?;
        cfg.system()?;
        Ok(cfg)
    }

    pub fn system(&self) -> Result<SystemParams> {
        SystemParams::with_unit(self.omega_r, self.kappa, self.unit)
    }

    pub fn dispersive(&self) -> Result<DispersiveParams> {
        let omega_q = self
            .omega_q
            .ok_or_else(|| invalid("config lacks omega_q needed for dispersive readout"))?;
        let g = self
            .g
            .ok_or_else(|| invalid("config lacks g needed for dispersive readout"))?;
        DispersiveParams::with_unit(self.omega_r, omega_q, g, self.kappa, self.unit)
    }

    /// Angular-unit omega_q if present.
    pub fn omega_q_angular(&self) -> Option<f64> {
        self.omega_q.map(|w| self.unit.to_angular(w))
    }
}
