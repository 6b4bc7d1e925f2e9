//! Monte Carlo SNR statistics under resonator- and qubit-frequency mismatch.
//!
//! The pulse stays designed for the nominal parameters. Each sample perturbs
//! `ω_r → ω_r(1 + δ_r)` and `ω_q → ω_q(1 + δ_q)`: the swept axis takes the
//! grid value, the other is drawn uniformly from `±width`. The perturbed
//! dispersive shift `χ' = g²/(ω_q' − ω_r')` sets the conditioned rotation
//! rates. With `frame_offset` the drive also stays at the nominal resonator
//! frequency, adding `ω_r' − ω_r` to both rates.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PulseError, Result};
use crate::model::DispersiveParams;
use crate::pulse::Pulse;
use crate::readout::snr_exact_rates;

pub const MAX_MISMATCH: f64 = 0.2;
pub const MAX_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchAxis {
    Resonator,
    Qubit,
}

impl FromStr for MismatchAxis {
    type Err = PulseError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resonator" => Ok(Self::Resonator),
            "qubit" => Ok(Self::Qubit),
            other => Err(invalid(format!("unknown mismatch axis '{other}' (resonator|qubit)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub axis: MismatchAxis,
    pub samples: usize,
    pub seed: u64,
    /// Half-width of the uniform draw on the other axis.
    pub width: f64,
    pub lo_angle: f64,
    pub frame_offset: bool,
}

impl McConfig {
    pub fn new(axis: MismatchAxis, samples: usize, seed: u64) -> Self {
        Self {
            axis,
            samples,
            seed,
            width: MAX_MISMATCH,
            lo_angle: 0.0,
            frame_offset: false,
        }
    }

    pub fn with_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub axis: MismatchAxis,
    pub sweep_axis: Vec<f64>,
    pub mean_snr: Vec<f64>,
    pub var_snr: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl McStats {
    /// `1 − mean/nominal` at each grid point.
    pub fn relative_degradation(&self, nominal: f64) -> Vec<f64> {
        self.mean_snr.iter().map(|m| 1.0 - m / nominal).collect()
    }
}

fn in_range(v: f64) -> bool {
    v.is_finite() && v.abs() <= MAX_MISMATCH * (1.0 + 1e-12)
}

/// SNR at `τ = t_f` for one perturbed draw.
pub fn perturbed_snr(
    params: &DispersiveParams,
    pulse: &Pulse,
    delta_r: f64,
    delta_q: f64,
    lo_angle: f64,
    frame_offset: bool,
) -> Result<f64> {
    let omega_r = params.omega_r * (1.0 + delta_r);
    let omega_q = params.omega_q * (1.0 + delta_q);
    let perturbed = params.with_frequencies(omega_r, omega_q)?;
    let offset = if frame_offset { omega_r - params.omega_r } else { 0.0 };
    let chi = perturbed.chi();
    snr_exact_rates(params.kappa, offset + chi, offset - chi, pulse, lo_angle, pulse.duration())
}

pub fn mc_snr(params: &DispersiveParams, pulse: &Pulse, grid: &[f64], cfg: &McConfig) -> Result<McStats> {
    if grid.is_empty() {
        return Err(invalid("mismatch grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|v| !in_range(**v)) {
        return Err(invalid(format!("mismatch {bad} outside ±{MAX_MISMATCH}")));
    }
    if cfg.samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    if cfg.samples > MAX_SAMPLES {
        return Err(invalid(format!("samples {} above the limit of {MAX_SAMPLES}", cfg.samples)));
    }
    if !(cfg.width >= 0.0 && in_range(cfg.width)) {
        return Err(invalid(format!("sampling width {} outside [0, {MAX_MISMATCH}]", cfg.width)));
    }

    let n = cfg.samples;
    let values: Vec<f64> = (0..grid.len() * n)
        .into_par_iter()
        .map(|idx| {
            let (point, sample) = (idx / n, idx % n);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(((point as u64) << 32) | sample as u64);
            let u: f64 = rng.random();
            let other = cfg.width * (2.0 * u - 1.0);
            let (dr, dq) = match cfg.axis {
                MismatchAxis::Resonator => (grid[point], other),
                MismatchAxis::Qubit => (other, grid[point]),
            };
            perturbed_snr(params, pulse, dr, dq, cfg.lo_angle, cfg.frame_offset)
        })
        .collect::<Result<_>>()?;

    let mut mean_snr = Vec::with_capacity(grid.len());
    let mut var_snr = Vec::with_capacity(grid.len());
    for chunk in values.chunks(n) {
        // Welford: a constant sample gives exactly that mean and zero spread
        let (mut mean, mut m2) = (0.0, 0.0);
        for (k, &v) in chunk.iter().enumerate() {
            let d = v - mean;
            mean += d / (k + 1) as f64;
            m2 += d * (v - mean);
        }
        mean_snr.push(mean);
        var_snr.push(m2 / n as f64);
    }
    Ok(McStats {
        axis: cfg.axis,
        sweep_axis: grid.to_vec(),
        mean_snr,
        var_snr,
        samples: n,
        seed: cfg.seed,
    })
}
