//! Figure datasets and run manifests.
//!
//! Each figure id expands to one or more CSV files. Every file starts with
//! `#` provenance lines naming the producing operations, followed by a
//! header row. A `manifest.json` next to them records the command line,
//! the full configuration, the seed and SHA-256 checksums, which is enough
//! to regenerate the directory bit for bit.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{adiabatic_amplitude, calibrate_hahn, cd_transform, hahn_pulse, steady_state_phase, HahnSpec};
use crate::dynamics::trajectory_exact;
use crate::error::{invalid, PulseError, Result};
use crate::lin_control::{energy_cost, synth_energy_optimal, SystemMatrix};
use crate::metrics::efficiency;
use crate::model::{Config, DispersiveParams, SimOptions};
use crate::pulse::Pulse;
use crate::readout::{design_energy_optimal, iq_normalized, readout_trajectories, snr_exact};
use crate::robustness::{mc_snr, McConfig, MismatchAxis};
use crate::time_optimal::{eps_max_for_duration, min_time, synth_time_optimal};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Figure {
    #[serde(rename = "fig2a")]
    Fig2a,
    #[serde(rename = "fig2b")]
    Fig2b,
    #[serde(rename = "fig3a")]
    Fig3a,
    #[serde(rename = "fig3b")]
    Fig3b,
    #[serde(rename = "figIQ")]
    FigIq,
    #[serde(rename = "figSNR")]
    FigSnr,
    #[serde(rename = "figRob")]
    FigRob,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::FigIq,
        Figure::FigSnr,
        Figure::FigRob,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::FigIq => "figIQ",
            Figure::FigSnr => "figSNR",
            Figure::FigRob => "figRob",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = PulseError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let known: Vec<_> = Figure::ALL.iter().map(|f| f.id()).collect();
                invalid(format!("unknown figure '{s}' (expected one of {})", known.join(", ")))
            })
    }
}

/// Parameters behind every figure; defaults are the published ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproConfig {
    /// Single-resonator frequency and decay (rad/s).
    pub omega_r: f64,
    pub kappa: f64,
    pub alpha_f_modulus: f64,
    /// Dispersive-readout setting (rad/s).
    pub readout_omega_r: f64,
    pub readout_omega_q: f64,
    pub readout_kappa: f64,
    pub readout_t_f: f64,
    pub n_crit: Vec<f64>,
    pub samples: usize,
    pub grid_points: usize,
    pub seed: u64,
}

impl Default for ReproConfig {
    fn default() -> Self {
        Self {
            omega_r: TAU * 0.3e6,
            kappa: TAU * 1e4,
            alpha_f_modulus: 10.0,
            readout_omega_r: TAU * 6e9,
            readout_omega_q: TAU * 4e9,
            readout_kappa: TAU * 1e4,
            readout_t_f: 1e-5,
            n_crit: vec![1.0, 10.0, 100.0],
            samples: 1000,
            grid_points: 41,
            seed: 42,
        }
    }
}

impl ReproConfig {
    /// Overrides from a user config: the resonator block when `omega_q`
    /// is absent, the readout block otherwise.
    pub fn with_config(mut self, cfg: &Config) -> Result<Self> {
        let sys = cfg.system()?;
        match cfg.omega_q_angular() {
            None => {
                self.omega_r = sys.omega_r;
                self.kappa = sys.kappa;
            }
            Some(wq) => {
                self.readout_omega_r = sys.omega_r;
                self.readout_omega_q = wq;
                self.readout_kappa = sys.kappa;
            }
        }
        Ok(self)
    }

    pub fn system(&self) -> Result<SystemMatrix> {
        SystemMatrix::new(self.omega_r, self.kappa)
    }

    /// `|α_f| e^{iϑ}` with ϑ the steady-state phase.
    pub fn target(&self) -> Result<Complex64> {
        Ok(Complex64::from_polar(self.alpha_f_modulus, steady_state_phase(&self.system()?)))
    }

    pub fn readout(&self, n_crit: f64) -> Result<DispersiveParams> {
        DispersiveParams::for_critical_photon_number(n_crit, self.readout_omega_r, self.readout_omega_q, self.readout_kappa)
    }

    fn validate(&self) -> Result<()> {
        self.system()?;
        if !(self.alpha_f_modulus > 0.0 && self.alpha_f_modulus.is_finite()) {
            return Err(invalid("alpha_f_modulus must be positive"));
        }
        if !(self.readout_t_f > 0.0) {
            return Err(invalid("readout_t_f must be positive"));
        }
        if self.n_crit.is_empty() {
            return Err(invalid("n_crit list is empty"));
        }
        if self.grid_points < 2 {
            return Err(invalid("grid_points must be at least 2"));
        }
        for &n in &self.n_crit {
            self.readout(n)?;
        }
        Ok(())
    }
}

/// One CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub file: String,
    pub provenance: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    fn new(file: impl Into<String>, provenance: &[&str], columns: &[&str]) -> Self {
        Self {
            file: file.into(),
            provenance: provenance.iter().map(|s| s.to_string()).collect(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for line in &self.provenance {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// t_f grid of the energy-cost panel: 30 log-spaced points over 1-100 μs.
pub fn fig2a_grid() -> Vec<f64> {
    logspace(1e-6, 1e-4, 30)
}

/// The three single-resonator schemes at one duration.
pub struct SchemeSet {
    pub optimal: Pulse,
    pub hahn: Pulse,
    pub cd: Pulse,
}

pub fn schemes(cfg: &ReproConfig, t_f: f64) -> Result<SchemeSet> {
    let sys = cfg.system()?;
    let target = cfg.target()?;
    let optimal = synth_energy_optimal(&sys, Complex64::new(0.0, 0.0), target, t_f)?;
    let hahn = hahn_pulse(&calibrate_hahn(&sys, cfg.alpha_f_modulus, t_f)?)?;
    let cd_base = hahn_pulse(&HahnSpec {
        omega0: adiabatic_amplitude(&sys, cfg.alpha_f_modulus),
        t_f,
    })?;
    Ok(SchemeSet {
        optimal,
        hahn,
        cd: cd_transform(&cd_base, &sys),
    })
}

fn fig2a(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    let mut d = Dataset::new(
        "fig2a_energy_cost.csv",
        &[
            "energy cost J_E versus t_f",
            "j_opt: lin_control::synth_energy_optimal + lin_control::energy_cost",
            "j_hahn: baselines::calibrate_hahn + lin_control::energy_cost",
            "j_cd: baselines::cd_transform(adiabatic Hahn) + lin_control::energy_cost",
        ],
        &["t_f_s", "j_opt", "j_hahn", "j_cd"],
    );
    d.rows = fig2a_grid()
        .par_iter()
        .map(|&t_f| {
            let s = schemes(cfg, t_f)?;
            Ok(vec![
                t_f,
                energy_cost(&s.optimal, t_f)?.j_e,
                energy_cost(&s.hahn, t_f)?.j_e,
                energy_cost(&s.cd, t_f)?.j_e,
            ])
        })
        .collect::<Result<_>>()?;
    Ok(vec![d])
}

fn fig2b(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    let t_f = 1e-5;
    let sys = cfg.system()?;
    let s = schemes(cfg, t_f)?;
    let times = linspace(0.0, t_f, 2000);
    let mut d = Dataset::new(
        "fig2b_photon_number.csv",
        &[
            "photon number <N(t)> = |alpha(t)|^2 at t_f = 10 us",
            "dynamics::trajectory_exact for the energy-optimal, Hahn and CD pulses",
        ],
        &["t_s", "n_opt", "n_hahn", "n_cd"],
    );
    let zero = Complex64::new(0.0, 0.0);
    let curves = [&s.optimal, &s.hahn, &s.cd]
        .iter()
        .map(|p| trajectory_exact(&sys, p, zero, &times).map(|t| t.photon()))
        .collect::<Result<Vec<_>>>()?;
    d.rows = times
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![t, curves[0][i], curves[1][i], curves[2][i]])
        .collect();
    Ok(vec![d])
}

/// ε_max grid for the minimal-time panel; always contains 1e7.
pub fn fig3a_eps_grid() -> Vec<f64> {
    let mut g = logspace(1e5, 1e9, 41);
    g.push(1e7);
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| ((*a - *b) / *b).abs() < 1e-12);
    g
}

fn fig3a(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    let sys = cfg.system()?;
    let target = cfg.target()?;
    let mut d = Dataset::new(
        "fig3a_min_time.csv",
        &[
            "minimal time t_f_min versus 1/eps_max (eps_max in 1/s)",
            "time_optimal::min_time from rest; t_f_min = inf where the target is unreachable",
        ],
        &["inv_eps_max_s", "eps_max", "t_f_min_s", "theta_rad"],
    );
    for eps in fig3a_eps_grid() {
        let sol = min_time(&sys, Complex64::new(0.0, 0.0), target, eps)?;
        d.rows.push(vec![1.0 / eps, eps, sol.t_f_min, sol.theta]);
    }
    Ok(vec![d])
}

fn fig3b(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    let sys = cfg.system()?;
    let zero = Complex64::new(0.0, 0.0);
    let target = cfg.target()?;
    let mut d = Dataset::new(
        "fig3b_efficiency.csv",
        &[
            "quantum efficiency eta = S0 / integral |alpha'| dt versus t_f",
            "metrics::efficiency on dynamics::trajectory_exact (2000 points)",
            "time-optimal pulses use time_optimal::eps_max_for_duration so that t_f_min = t_f",
        ],
        &["t_f_s", "eta_opt", "eta_time", "eta_hahn", "eta_cd", "eta_bound"],
    );
    d.rows = fig2a_grid()
        .par_iter()
        .map(|&t_f| {
            let s = schemes(cfg, t_f)?;
            let eps = eps_max_for_duration(&sys, cfg.alpha_f_modulus, t_f)?;
            let sol = min_time(&sys, zero, target, eps)?;
            let time_opt = synth_time_optimal(&sol, &sys)?;
            let eta = |p: &Pulse, tf: f64| -> Result<(f64, f64)> {
                let r = efficiency(&trajectory_exact(&sys, p, zero, &linspace(0.0, tf, 2000))?)?;
                Ok((r.eta, r.eta_bound))
            };
            let (e_opt, bound) = eta(&s.optimal, t_f)?;
            Ok(vec![
                t_f,
                e_opt,
                eta(&time_opt, sol.t_f_min)?.0,
                eta(&s.hahn, t_f)?.0,
                eta(&s.cd, t_f)?.0,
                bound,
            ])
        })
        .collect::<Result<_>>()?;
    Ok(vec![d])
}

fn ncrit_label(n: f64) -> String {
    format!("{n}").replace('.', "p")
}

fn fig_iq(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    cfg.n_crit
        .par_iter()
        .map(|&n| {
            let p = cfg.readout(n)?;
            let pulse = design_energy_optimal(&p, cfg.readout_t_f, 1.0)?;
            let pair = readout_trajectories(&p, &pulse, &SimOptions::default())?;
            let iq = iq_normalized(&pair);
            let stride = (iq.len() - 1).div_ceil(2000).max(1);
            let mut d = Dataset::new(
                format!("figIQ_ncrit{}.csv", ncrit_label(n)),
                &[
                    &format!("normalised IQ trajectories, n_crit = {n}, energy-optimal pulse designed for +chi"),
                    "readout::readout_trajectories + readout::iq_normalized",
                ],
                &["t_s", "i_norm_e", "q_norm_e", "i_norm_g", "q_norm_g"],
            );
            let last = iq.len() - 1;
            d.rows = iq
                .iter()
                .enumerate()
                .filter(|(i, _)| i % stride == 0 || *i == last)
                .map(|(_, q)| vec![q.t, q.i_e, q.q_e, q.i_g, q.q_g])
                .collect();
            Ok(d)
        })
        .collect()
}

fn fig_snr(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    let taus = linspace(0.0, cfg.readout_t_f, 2000);
    let mut columns = vec!["tau_s".to_string()];
    let mut curves = Vec::new();
    for &n in &cfg.n_crit {
        let p = cfg.readout(n)?;
        let pulse = design_energy_optimal(&p, cfg.readout_t_f, 1.0)?;
        columns.push(format!("snr_ncrit{}", ncrit_label(n)));
        curves.push(
            taus.par_iter()
                .map(|&tau| snr_exact(&p, &pulse, 0.0, tau))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut d = Dataset::new(
        "figSNR_snr.csv",
        &[
            "homodyne SNR versus integration time, phi = 0, energy-optimal pulses",
            "readout::snr_exact (closed-form integral of alpha_e - alpha_g)",
        ],
        &[],
    );
    d.columns = columns;
    d.rows = taus
        .iter()
        .enumerate()
        .map(|(i, &t)| std::iter::once(t).chain(curves.iter().map(|c| c[i])).collect())
        .collect();
    Ok(vec![d])
}

fn fig_rob(cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    let grid = linspace(-0.2, 0.2, cfg.grid_points);
    let mut out = Vec::new();
    for axis in [MismatchAxis::Resonator, MismatchAxis::Qubit] {
        let name = match axis {
            MismatchAxis::Resonator => "resonator",
            MismatchAxis::Qubit => "qubit",
        };
        let mut d = Dataset::new(
            format!("figRob_{name}.csv"),
            &[
                &format!("SNR at tau = t_f under relative {name}-frequency mismatch, other frequency uniform within +-20%"),
                &format!("robustness::mc_snr, {} samples per point, seed {}", cfg.samples, cfg.seed),
            ],
            &["mismatch"],
        );
        let mut stats = Vec::new();
        for &n in &cfg.n_crit {
            let p = cfg.readout(n)?;
            let pulse = design_energy_optimal(&p, cfg.readout_t_f, 1.0)?;
            stats.push(mc_snr(&p, &pulse, &grid, &McConfig::new(axis, cfg.samples, cfg.seed))?);
            d.columns.push(format!("mean_snr_ncrit{}", ncrit_label(n)));
            d.columns.push(format!("var_snr_ncrit{}", ncrit_label(n)));
        }
        d.rows = grid
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let mut row = vec![m];
                for s in &stats {
                    row.push(s.mean_snr[i]);
                    row.push(s.var_snr[i]);
                }
                row
            })
            .collect();
        out.push(d);
    }
    Ok(out)
}

pub fn figure_datasets(fig: Figure, cfg: &ReproConfig) -> Result<Vec<Dataset>> {
    cfg.validate()?;
    match fig {
        Figure::Fig2a => fig2a(cfg),
        Figure::Fig2b => fig2b(cfg),
        Figure::Fig3a => fig3a(cfg),
        Figure::Fig3b => fig3b(cfg),
        Figure::FigIq => fig_iq(cfg),
        Figure::FigSnr => fig_snr(cfg),
        Figure::FigRob => fig_rob(cfg),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub figure: Figure,
    pub config: ReproConfig,
    pub seed: u64,
    pub version: String,
    /// File name → hex SHA-256.
    pub checksums: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| invalid(format!("not a file path: {}", path.display())))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn reproduce(fig: Figure, cfg: &ReproConfig, out_dir: &Path, command_line: Vec<String>) -> Result<RunManifest> {
    let datasets = figure_datasets(fig, cfg)?;
    fs::create_dir_all(out_dir)?;
    let mut checksums = BTreeMap::new();
    for d in &datasets {
        let mut text = format!("# pulseforge {VERSION} | figure {fig} | seed {}\n", cfg.seed);
        text.push_str(&d.to_csv());
        write_atomic(&out_dir.join(&d.file), text.as_bytes())?;
        checksums.insert(d.file.clone(), sha256_hex(text.as_bytes()));
    }
    let manifest = RunManifest {
        command_line,
        figure: fig,
        config: cfg.clone(),
        seed: cfg.seed,
        version: VERSION.to_string(),
        checksums,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    write_atomic(&out_dir.join(format!("{fig}_manifest.json")), json.as_bytes())?;
    Ok(manifest)
}

/// Regenerates a manifest's figure into `out_dir` and reports files whose
/// checksum differs.
pub fn replay(manifest: &RunManifest, out_dir: &Path) -> Result<Vec<String>> {
    let again = reproduce(manifest.figure, &manifest.config, out_dir, manifest.command_line.clone())?;
    Ok(manifest
        .checksums
        .iter()
        .filter(|(k, v)| again.checksums.get(*k) != Some(v))
        .map(|(k, _)| k.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.id().parse::<Figure>().unwrap(), f);
        }
        assert!("fig9".parse::<Figure>().is_err());
    }

    #[test]
    fn grids() {
        let g = fig2a_grid();
        assert_eq!(g.len(), 30);
        assert!((g[0] - 1e-6).abs() < 1e-18 && (g[29] - 1e-4).abs() < 1e-16);
        assert!(fig3a_eps_grid().contains(&1e7));
        assert_eq!(*linspace(0.0, 3.0, 7).last().unwrap(), 3.0);
    }

    #[test]
    fn csv_layout() {
        let mut d = Dataset::new("x.csv", &["made by hand"], &["a", "b"]);
        d.rows.push(vec![1.0, 2.5]);
        assert_eq!(d.to_csv(), "# made by hand\na,b\n1e0,2.5e0\n");
        assert_eq!(d.column("b"), Some(vec![2.5]));
    }

    #[test]
    fn fig3a_contains_anchor() {
        let d = &figure_datasets(Figure::Fig3a, &ReproConfig::default()).unwrap()[0];
        let row = d.rows.iter().find(|r| r[1] == 1e7).unwrap();
        assert!((row[2] - 1.016e-6).abs() < 1e-9);
        assert!(d.rows[0][2].is_infinite());
    }
}
