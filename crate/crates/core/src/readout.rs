//! Dispersive readout: qubit-conditioned resonator trajectories, IQ-plane
//! output and the homodyne signal-to-noise ratio.
//!
//! With the qubit in |e⟩ (|g⟩) the resonator rotates at `+χ` (`−χ`) in the
//! frame of the drive carrier. For coherent states and vacuum input noise
//! the homodyne SNR after integrating for `τ` reduces to
//!
//! ```text
//! SNR(τ) = 2κ |∫₀^τ Re[(α_e − α_g) e^{−iφ}] dt| / √(2κτ)
//! ```
//!
//! The drive contribution to the output field cancels between the two
//! qubit states.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::steady_state_phase;
use crate::dynamics::{integrate, response_integral_exact};
use crate::error::{invalid, Result};
use crate::lin_control::{synth_energy_optimal, SystemMatrix};
use crate::model::{DispersiveParams, SimOptions, Trajectory};
use crate::pulse::Pulse;
use crate::quadrature::cumulative_trapezoid;
use crate::time_optimal::{min_time, synth_time_optimal, TimeOptimalSolution};

/// Photon number may exceed `n_crit` by this factor before a warning.
const NCRIT_MARGIN: f64 = 1.1;

/// Trajectories for both qubit states on a common grid.
#[derive(Clone, Debug)]
pub struct ReadoutPair {
    pub traj_e: Trajectory,
    pub traj_g: Trajectory,
    pub max_photon: f64,
    /// Set when the photon number leaves the dispersive regime.
    pub dispersive_warning: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IqPoint {
    pub t: f64,
    pub i_e: f64,
    pub q_e: f64,
    pub i_g: f64,
    pub q_g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnrSeries {
    pub taus: Vec<f64>,
    pub snr: Vec<f64>,
}

impl SnrSeries {
    pub fn peak(&self) -> (f64, f64) {
        self.taus
            .iter()
            .zip(&self.snr)
            .fold((0.0, 0.0), |best, (&t, &s)| if s > best.1 { (t, s) } else { best })
    }

    pub fn last(&self) -> f64 {
        self.snr.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug)]
pub struct ReadoutResult {
    pub traj_e: Trajectory,
    pub traj_g: Trajectory,
    pub iq_normalized: Vec<IqPoint>,
    pub snr: SnrSeries,
    pub lo_angle: f64,
    pub dispersive_warning: bool,
}

/// Target `√n_crit e^{iϑ}` for the conditioned resonator.
pub fn readout_target(params: &DispersiveParams, sign: f64) -> Complex64 {
    let sys = params.conditioned(sign);
    Complex64::from_polar(params.n_crit().sqrt(), steady_state_phase(&sys))
}

/// Energy-optimal readout pulse designed for `χ_z = sign·χ`.
pub fn design_energy_optimal(params: &DispersiveParams, t_f: f64, sign: f64) -> Result<Pulse> {
    let sys = params.conditioned(sign);
    synth_energy_optimal(&sys, Complex64::new(0.0, 0.0), readout_target(params, sign), t_f)
}

/// Time-optimal readout pulse at drive bound `eps_max` for `χ_z = sign·χ`.
pub fn design_time_optimal(params: &DispersiveParams, eps_max: f64, sign: f64) -> Result<(Pulse, TimeOptimalSolution)> {
    let sys = params.conditioned(sign);
    let sol = min_time(&sys, Complex64::new(0.0, 0.0), readout_target(params, sign), eps_max)?;
    Ok((synth_time_optimal(&sol, &sys)?, sol))
}

/// Evolves both qubit branches under the same pulse.
pub fn readout_trajectories(params: &DispersiveParams, pulse: &Pulse, opts: &SimOptions) -> Result<ReadoutPair> {
    let t_f = pulse.duration();
    let zero = Complex64::new(0.0, 0.0);
    let traj_e = integrate(&params.conditioned(1.0), pulse, zero, t_f, opts)?;
    let traj_g = integrate(&params.conditioned(-1.0), pulse, zero, t_f, opts)?;
    let max_photon = traj_e
        .alphas
        .iter()
        .chain(&traj_g.alphas)
        .map(|a| a.norm_sqr())
        .fold(0.0f64, f64::max);
    Ok(ReadoutPair {
        traj_e,
        traj_g,
        max_photon,
        dispersive_warning: max_photon > NCRIT_MARGIN * params.n_crit(),
    })
}

/// IQ samples scaled by the largest `√(I² + Q²)` over both branches.
pub fn iq_normalized(pair: &ReadoutPair) -> Vec<IqPoint> {
    let scale = pair
        .traj_e
        .alphas
        .iter()
        .chain(&pair.traj_g.alphas)
        .map(|a| a.norm())
        .fold(0.0f64, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    pair.traj_e
        .times
        .iter()
        .zip(pair.traj_e.alphas.iter().zip(&pair.traj_g.alphas))
        .map(|(&t, (e, g))| IqPoint {
            t,
            i_e: e.re / scale,
            q_e: e.im / scale,
            i_g: g.re / scale,
            q_g: g.im / scale,
        })
        .collect()
}

fn common_grid(pair: &ReadoutPair) -> Result<()> {
    if pair.traj_e.times != pair.traj_g.times {
        return Err(invalid("readout trajectories are not on a common time grid"));
    }
    Ok(())
}

/// `√(2κτ)`-normalised homodyne contrast for a given quadrature integral.
fn snr_from_integral(kappa: f64, integral: Complex64, lo_angle: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let phi = lo_angle.rem_euclid(PI);
    let projected = (integral * Complex64::from_polar(1.0, -phi)).re;
    2.0 * kappa * projected.abs() / (2.0 * kappa * tau).sqrt()
}

fn difference_integral(pair: &ReadoutPair) -> (Vec<f64>, Vec<Complex64>) {
    let t = &pair.traj_e.times;
    let d: Vec<Complex64> = pair
        .traj_e
        .alphas
        .iter()
        .zip(&pair.traj_g.alphas)
        .map(|(e, g)| e - g)
        .collect();
    let dv: Option<Vec<Complex64>> = match (&pair.traj_e.velocities, &pair.traj_g.velocities) {
        (Some(ve), Some(vg)) => Some(ve.iter().zip(vg).map(|(a, b)| a - b).collect()),
        _ => None,
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(t.len());
    out.push(acc);
    for i in 1..t.len() {
        let h = t[i] - t[i - 1];
        acc += 0.5 * h * (d[i - 1] + d[i]);
        // end-corrected trapezoid, fourth order when slopes are known
        if let Some(v) = &dv {
            acc += h * h / 12.0 * (v[i - 1] - v[i]);
        }
        out.push(acc);
    }
    (t.clone(), out)
}

/// SNR(τ) on the trajectory grid.
pub fn snr(pair: &ReadoutPair, params: &DispersiveParams, lo_angle: f64) -> Result<SnrSeries> {
    common_grid(pair)?;
    let (taus, integrals) = difference_integral(pair);
    let snr = taus
        .iter()
        .zip(&integrals)
        .map(|(&tau, &x)| snr_from_integral(params.kappa, x, lo_angle, tau))
        .collect();
    Ok(SnrSeries { taus, snr })
}

/// SNR(t_f) for each local-oscillator angle.
pub fn lo_sweep(pair: &ReadoutPair, params: &DispersiveParams, angles: &[f64]) -> Result<Vec<f64>> {
    if angles.is_empty() {
        return Err(invalid("LO-angle grid is empty"));
    }
    common_grid(pair)?;
    let (taus, integrals) = difference_integral(pair);
    let (tau, x) = (*taus.last().unwrap(), *integrals.last().unwrap());
    Ok(angles
        .iter()
        .map(|&phi| snr_from_integral(params.kappa, x, phi, tau))
        .collect())
}

/// Closed-form SNR(τ) for resonators rotating at `rate_e` / `rate_g`, both
/// starting empty. Requires an exponential-sum pulse.
pub fn snr_exact_rates(kappa: f64, rate_e: f64, rate_g: f64, pulse: &Pulse, lo_angle: f64, tau: f64) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let ie = response_integral_exact(&SystemMatrix::new(rate_e, kappa)?, pulse, zero, tau)?;
    let ig = response_integral_exact(&SystemMatrix::new(rate_g, kappa)?, pulse, zero, tau)?;
    Ok(snr_from_integral(kappa, ie - ig, lo_angle, tau))
}

/// Closed-form SNR(τ) at nominal parameters.
pub fn snr_exact(params: &DispersiveParams, pulse: &Pulse, lo_angle: f64, tau: f64) -> Result<f64> {
    snr_exact_rates(params.kappa, params.chi(), -params.chi(), pulse, lo_angle, tau)
}

pub fn run_readout(params: &DispersiveParams, pulse: &Pulse, lo_angle: f64, opts: &SimOptions) -> Result<ReadoutResult> {
    let pair = readout_trajectories(params, pulse, opts)?;
    let series = snr(&pair, params, lo_angle)?;
    let iq = iq_normalized(&pair);
    Ok(ReadoutResult {
        iq_normalized: iq,
        snr: series,
        lo_angle,
        dispersive_warning: pair.dispersive_warning,
        traj_e: pair.traj_e,
        traj_g: pair.traj_g,
    })
}

/// Sample statistics of simulated integrated homodyne records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomodyneStats {
    pub taus: Vec<f64>,
    pub mean_e: Vec<f64>,
    pub mean_g: Vec<f64>,
    pub var_e: Vec<f64>,
    pub var_g: Vec<f64>,
    /// `|mean_e − mean_g| / √(var_e + var_g)`.
    pub snr: Vec<f64>,
    pub shots: usize,
    pub seed: u64,
}

/// Monte Carlo homodyne records: deterministic mean signal plus white
/// vacuum noise of variance `κτ` per state, scaled by `noise_scale`
/// (1 for physical noise, 0 to inspect the deterministic part).
///
/// Each shot draws from its own ChaCha stream keyed by `(seed, shot)`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_homodyne_records(
    pair: &ReadoutPair,
    pulse: &Pulse,
    params: &DispersiveParams,
    lo_angle: f64,
    taus: &[f64],
    shots: usize,
    seed: u64,
    noise_scale: f64,
) -> Result<HomodyneStats> {
    if shots == 0 {
        return Err(invalid("shots must be positive"));
    }
    common_grid(pair)?;
    if taus.is_empty() || taus.windows(2).any(|w| !(w[1] > w[0])) || taus[0] <= 0.0 {
        return Err(invalid("record times must be positive and strictly increasing"));
    }
    let grid = &pair.traj_e.times;
    if *taus.last().unwrap() > grid[grid.len() - 1] * (1.0 + 1e-12) {
        return Err(invalid("record time beyond the simulated trajectory"));
    }

    let kappa = params.kappa;
    let rot = Complex64::from_polar(1.0, -lo_angle);
    let signal = |traj: &Trajectory| -> Vec<f64> {
        let y: Vec<f64> = traj
            .times
            .iter()
            .zip(&traj.alphas)
            .map(|(&t, a)| 2.0 * ((pulse.eval(t) + kappa * a) * rot).re)
            .collect();
        let cum = cumulative_trapezoid(&traj.times, &y);
        taus.iter().map(|&tau| interpolate(&traj.times, &cum, tau)).collect()
    };
    let (sig_e, sig_g) = (signal(&pair.traj_e), signal(&pair.traj_g));

    let increments: Vec<f64> = taus
        .iter()
        .scan(0.0, |prev, &t| {
            let dt = t - *prev;
            *prev = t;
            Some((kappa * dt).sqrt())
        })
        .collect();

    let records: Vec<(Vec<f64>, Vec<f64>)> = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot as u64);
            let mut walk = |sig: &[f64]| -> Vec<f64> {
                let mut w = 0.0;
                sig.iter()
                    .zip(&increments)
                    .map(|(s, sd)| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        w += sd * z;
                        s + noise_scale * w
                    })
                    .collect()
            };
            let e = walk(&sig_e);
            let g = walk(&sig_g);
            (e, g)
        })
        .collect();

    let n = shots as f64;
    let m = taus.len();
    let mut stats = HomodyneStats {
        taus: taus.to_vec(),
        mean_e: vec![0.0; m],
        mean_g: vec![0.0; m],
        var_e: vec![0.0; m],
        var_g: vec![0.0; m],
        snr: vec![0.0; m],
        shots,
        seed,
    };
    for (e, g) in &records {
        for j in 0..m {
            stats.mean_e[j] += e[j] / n;
            stats.mean_g[j] += g[j] / n;
        }
    }
    let denom = if shots > 1 { n - 1.0 } else { 1.0 };
    for (e, g) in &records {
        for j in 0..m {
            stats.var_e[j] += (e[j] - stats.mean_e[j]).powi(2) / denom;
            stats.var_g[j] += (g[j] - stats.mean_g[j]).powi(2) / denom;
        }
    }
    for j in 0..m {
        let spread = (stats.var_e[j] + stats.var_g[j]).sqrt();
        let gap = (stats.mean_e[j] - stats.mean_g[j]).abs();
        stats.snr[j] = if spread > 0.0 { gap / spread } else { f64::INFINITY };
    }
    Ok(stats)
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x).max(1) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - w) + ys[i + 1] * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn params(n_crit: f64) -> DispersiveParams {
        DispersiveParams::for_critical_photon_number(n_crit, TAU * 6e9, TAU * 4e9, TAU * 1e4).unwrap()
    }

    #[test]
    fn conditioned_rates_for_ncrit_100() {
        let p = params(100.0);
        assert_relative_eq!(p.conditioned(1.0).rotation_rate, -3.14159e7, max_relative = 1e-6);
        assert_relative_eq!(p.conditioned(-1.0).rotation_rate, 3.14159e7, max_relative = 1e-6);
    }

    #[test]
    fn snr_vanishes_at_zero_time_and_for_identical_states() {
        let p = params(100.0);
        let pulse = design_energy_optimal(&p, 1e-5, 1.0).unwrap();
        let pair = readout_trajectories(&p, &pulse, &SimOptions::default()).unwrap();
        let s = snr(&pair, &p, 0.0).unwrap();
        assert_eq!(s.snr[0], 0.0);
        let same = ReadoutPair {
            traj_g: pair.traj_e.clone(),
            ..pair
        };
        assert!(snr(&same, &p, 0.3).unwrap().snr.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matched_branch_reaches_critical_photon_number() {
        let p = params(100.0);
        let pulse = design_energy_optimal(&p, 1e-5, 1.0).unwrap();
        let pair = readout_trajectories(&p, &pulse, &SimOptions::default()).unwrap();
        let e = pair.traj_e.last().unwrap();
        let g = pair.traj_g.last().unwrap();
        assert_relative_eq!(e.norm_sqr(), 100.0, max_relative = 1e-6);
        assert!((g.norm_sqr() - 100.0).abs() > 1.0);
        assert!(!pair.dispersive_warning);
    }

    #[test]
    fn exact_snr_matches_trajectory_snr() {
        let p = params(100.0);
        let pulse = design_energy_optimal(&p, 1e-5, 1.0).unwrap();
        let pair = readout_trajectories(&p, &pulse, &SimOptions::default()).unwrap();
        let series = snr(&pair, &p, 0.0).unwrap();
        let exact = snr_exact(&p, &pulse, 0.0, 1e-5).unwrap();
        assert_relative_eq!(series.last(), exact, max_relative = 1e-3);
    }

    #[test]
    fn lo_sweep_requires_angles() {
        let p = params(100.0);
        let pulse = design_energy_optimal(&p, 1e-5, 1.0).unwrap();
        let pair = readout_trajectories(&p, &pulse, &SimOptions::default()).unwrap();
        assert!(lo_sweep(&pair, &p, &[]).is_err());
    }

    #[test]
    fn records_reject_zero_shots() {
        let p = params(100.0);
        let pulse = design_energy_optimal(&p, 1e-5, 1.0).unwrap();
        let pair = readout_trajectories(&p, &pulse, &SimOptions::default()).unwrap();
        assert!(simulate_homodyne_records(&pair, &pulse, &p, 0.0, &[1e-5], 0, 1, 1.0).is_err());
    }
}
