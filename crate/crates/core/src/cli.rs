//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on rejected input, 3 when the target is
//! unreachable, 1 for anything else (I/O, numerical failure).

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baselines::{adiabatic_amplitude, calibrate_hahn, cd_transform, hahn_phase_error, hahn_pulse, steady_state_phase, HahnSpec};
use crate::dynamics::{fock_oracle_from, integrate, trajectory_exact, FockState};
use crate::error::{invalid, PulseError, Result};
use crate::lin_control::{energy_cost, synth_energy_optimal, CostReport, SystemMatrix};
use crate::metrics::{efficiency, EfficiencyReport};
use crate::model::{Config, DispersiveParams, SimOptions, Trajectory};
use crate::pulse::Pulse;
use crate::readout::{design_energy_optimal, design_time_optimal, iq_normalized, readout_trajectories, snr};
use crate::repro::{linspace, reproduce, write_atomic, Figure, ReproConfig};
use crate::robustness::{mc_snr, McConfig, MismatchAxis};
use crate::time_optimal::{min_time, synth_time_optimal, TimeOptimalSolution};

pub mod parse {
    //! Value parsers shared by the subcommands.

    use std::f64::consts::PI;

    use num_complex::Complex64;

    use crate::error::{invalid, Result};

    /// `"10us"`, `"2.5e-6s"`, `"3 ms"`, `"40ns"` or bare seconds.
    pub fn duration(s: &str) -> Result<f64> {
        let s = s.trim();
        let split = s
            .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E' || c == 'µ' || c == 'μ')
            .unwrap_or(s.len());
        let (num, unit) = s.split_at(split);
        let value: f64 = num
            .trim()
            .parse()
            .map_err(|_| invalid(format!("cannot read duration '{s}'")))?;
        // divide by exact powers of ten so "10us" is exactly 1e-5
        let per_second = match unit.trim() {
            "" | "s" => 1.0,
            "ms" => 1e3,
            "us" | "µs" | "μs" => 1e6,
            "ns" => 1e9,
            other => return Err(invalid(format!("unknown time unit '{other}' in '{s}'"))),
        };
        let t = value / per_second;
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid(format!("duration must be positive, got '{s}'")));
        }
        Ok(t)
    }

    /// `"re,im"` or polar `"r@θrad"` / `"r@θdeg"`.
    pub fn complex(s: &str) -> Result<Complex64> {
        let s = s.trim();
        let bad = || invalid(format!("cannot read complex amplitude '{s}' (use 're,im' or 'r@thetarad')"));
        let z = if let Some((r, angle)) = s.split_once('@') {
            let r: f64 = r.trim().parse().map_err(|_| bad())?;
            let angle = angle.trim();
            let theta = if let Some(v) = angle.strip_suffix("rad") {
                v.trim().parse::<f64>().map_err(|_| bad())?
            } else if let Some(v) = angle.strip_suffix("deg") {
                v.trim().parse::<f64>().map_err(|_| bad())? * PI / 180.0
            } else {
                return Err(invalid(format!("polar angle in '{s}' needs a 'rad' or 'deg' suffix")));
            };
            if r < 0.0 {
                return Err(invalid(format!("polar modulus must be non-negative in '{s}'")));
            }
            Complex64::from_polar(r, theta)
        } else {
            let (re, im) = s.split_once(',').ok_or_else(bad)?;
            Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?)
        };
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(bad());
        }
        Ok(z)
    }

    /// `"lo:hi:n"`, inclusive on both ends.
    pub fn grid(s: &str) -> Result<Vec<f64>> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || invalid(format!("cannot read grid '{s}' (use lo:hi:n)"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !(lo.is_finite() && hi.is_finite()) {
            return Err(bad());
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        Ok(super::linspace(lo, hi, n))
    }
}

fn arg_duration(s: &str) -> std::result::Result<f64, String> {
    parse::duration(s).map_err(|e| e.to_string())
}

fn arg_complex(s: &str) -> std::result::Result<Complex64, String> {
    parse::complex(s).map_err(|e| e.to_string())
}

fn arg_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    parse::grid(s).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "pulseforge", version, about = "Optimal resonator drives and dispersive readout")]
pub struct Cli {
    /// JSON config {omega_r, omega_q, g, kappa, unit}
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output file (directory for `reproduce`); stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesise a pulse and write it as JSON
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Integrate a pulse and write the trajectory as CSV
    Simulate(SimulateArgs),
    /// Cost, efficiency and endpoint report for a pulse
    Analyze(AnalyzeArgs),
    /// Qubit-conditioned trajectories and homodyne SNR
    Readout(ReadoutArgs),
    /// Monte Carlo SNR under frequency mismatch
    Robustness(RobustnessArgs),
    /// Regenerate figure datasets with a manifest
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EpsUnit {
    /// value is already in 1/s
    Angular,
    /// value is a frequency; multiplied by 2π
    Cyclic,
}

impl EpsUnit {
    fn to_rate(self, v: f64) -> f64 {
        match self {
            EpsUnit::Angular => v,
            EpsUnit::Cyclic => TAU * v,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum SynthKind {
    /// Minimum-energy pulse
    Energy {
        #[arg(long, value_parser = arg_complex, allow_hyphen_values = true, default_value = "0,0")]
        alpha0: Complex64,
        /// Target, e.g. 10@1.587461rad or 3,-4
        #[arg(long, value_parser = arg_complex, allow_hyphen_values = true)]
        alphaf: Complex64,
        #[arg(long, value_parser = arg_duration)]
        tf: f64,
    },
    /// Minimum-time pulse under |ε| ≤ eps_max
    Time {
        #[arg(long, value_parser = arg_complex, allow_hyphen_values = true, default_value = "0,0")]
        alpha0: Complex64,
        #[arg(long, value_parser = arg_complex, allow_hyphen_values = true)]
        alphaf: Complex64,
        #[arg(long)]
        eps_max: f64,
        #[arg(long, value_enum)]
        eps_max_unit: EpsUnit,
    },
    /// sin² ramp calibrated to reach |alpha_f|
    Hahn(BaselineArgs),
    /// Counter-diabatic correction of the adiabatic sin² ramp
    Cd(BaselineArgs),
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    /// Target modulus |alpha_f|
    #[arg(long, default_value_t = 10.0)]
    pub alphaf_mod: f64,
    #[arg(long, value_parser = arg_duration)]
    pub tf: f64,
    /// Explicit amplitude Ω₀ in 1/s instead of the automatic one
    #[arg(long)]
    pub omega0: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Pulse JSON written by `synth`
    #[arg(long)]
    pub pulse: PathBuf,
    #[arg(long, value_parser = arg_complex, allow_hyphen_values = true, default_value = "0,0")]
    pub alpha0: Complex64,
    /// Defaults to the pulse duration
    #[arg(long, value_parser = arg_duration)]
    pub tf: Option<f64>,
    #[arg(long, value_parser = arg_duration)]
    pub dt: Option<f64>,
    /// Kerr coefficient K in 1/s
    #[arg(long, default_value_t = 0.0)]
    pub kerr: f64,
    /// Run the truncated-Fock master equation with this many levels instead
    #[arg(long)]
    pub fock_dim: Option<usize>,
    /// Keep at most this many rows
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub pulse: PathBuf,
    #[arg(long, value_parser = arg_complex, allow_hyphen_values = true, default_value = "0,0")]
    pub alpha0: Complex64,
    /// Target used for the steering residual
    #[arg(long, value_parser = arg_complex, allow_hyphen_values = true)]
    pub alphaf: Option<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReadoutScheme {
    Energy,
    Time,
}

#[derive(Args, Debug)]
pub struct ReadoutArgs {
    /// Critical photon number; sets g from the detuning
    #[arg(long)]
    pub ncrit: Option<f64>,
    #[arg(long, value_parser = arg_duration, default_value = "10us")]
    pub tf: f64,
    /// Local-oscillator angle φ (rad)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value = "energy")]
    pub scheme: ReadoutScheme,
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long, value_enum)]
    pub eps_max_unit: Option<EpsUnit>,
    /// Design the pulse for χ_z = −χ instead of +χ
    #[arg(long)]
    pub design_minus_chi: bool,
    /// Also write normalised IQ trajectories here
    #[arg(long)]
    pub iq_out: Option<PathBuf>,
    #[arg(long, value_parser = arg_duration)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub kerr: f64,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Resonator,
    Qubit,
}

#[derive(Args, Debug)]
pub struct RobustnessArgs {
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// lo:hi:n relative mismatch grid
    #[arg(long, value_parser = arg_grid, allow_hyphen_values = true, default_value = "-0.2:0.2:41")]
    pub grid: ::std::vec::Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100.0)]
    pub ncrit: f64,
    #[arg(long, value_parser = arg_duration, default_value = "10us")]
    pub tf: f64,
    /// Half-width of the uniform draw on the other frequency
    #[arg(long, default_value_t = 0.2)]
    pub width: f64,
    /// Keep the drive at the nominal resonator frequency
    #[arg(long)]
    pub frame_offset: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// fig2a, fig2b, fig3a, fig3b, figIQ, figSNR, figRob or all
    #[arg(long, default_value = "all")]
    pub figure: String,
    /// Monte Carlo samples per grid point for figRob
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Pulse file: the tagged pulse plus optional solver metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PulseDoc {
    #[serde(flatten)]
    pub pulse: Pulse,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_f_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reachable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratures: Option<Quadratures>,
}

impl PulseDoc {
    fn new(pulse: Pulse) -> Self {
        Self {
            pulse,
            t_f_min: None,
            theta: None,
            reachable: None,
            j_e: None,
            phase_error: None,
            quadratures: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// In-phase and quadrature drive components on a uniform grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quadratures {
    pub t_s: Vec<f64>,
    pub in_phase: Vec<f64>,
    pub quadrature: Vec<f64>,
}

impl Quadratures {
    fn of(pulse: &Pulse, n: usize) -> Self {
        let s = pulse.sample(n);
        Self {
            t_s: s.iter().map(|p| p.0).collect(),
            in_phase: s.iter().map(|p| p.1.re).collect(),
            quadrature: s.iter().map(|p| p.1.im).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub variant: String,
    pub t_f: f64,
    pub cost: CostReport,
    pub final_alpha: [f64; 2],
    pub max_photon: f64,
    pub efficiency: Option<EfficiencyReport>,
}

struct Ctx {
    config: Option<Config>,
    out: Option<PathBuf>,
    seed: u64,
}

impl Ctx {
    /// Single resonator: config if given, else the published example.
    fn system(&self) -> Result<SystemMatrix> {
        match &self.config {
            Some(c) => Ok(c.system()?.system_matrix()),
            None => SystemMatrix::new(TAU * 0.3e6, TAU * 1e4),
        }
    }

    fn dispersive(&self, n_crit: Option<f64>) -> Result<DispersiveParams> {
        let defaults = ReproConfig::default();
        match (&self.config, n_crit) {
            (Some(c), None) if c.g.is_some() => c.dispersive(),
            (Some(c), n) => {
                let wr = c.system()?.omega_r;
                let wq = c
                    .omega_q_angular()
                    .ok_or_else(|| invalid("config lacks omega_q needed for dispersive readout"))?;
                DispersiveParams::for_critical_photon_number(n.unwrap_or(100.0), wr, wq, c.system()?.kappa)
            }
            (None, n) => DispersiveParams::for_critical_photon_number(
                n.unwrap_or(100.0),
                defaults.readout_omega_r,
                defaults.readout_omega_q,
                defaults.readout_kappa,
            ),
        }
    }

    fn emit(&self, bytes: &[u8]) -> Result<()> {
        match &self.out {
            Some(p) => write_atomic(p, bytes),
            None => {
                use std::io::Write;
                std::io::stdout().write_all(bytes)?;
                Ok(())
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes(traj: &Trajectory) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    Ok(buf)
}

fn synth(ctx: &Ctx, kind: &SynthKind) -> Result<()> {
    let sys = ctx.system()?;
    let doc = match kind {
        SynthKind::Energy { alpha0, alphaf, tf } => {
            let pulse = synth_energy_optimal(&sys, *alpha0, *alphaf, *tf)?;
            let mut d = PulseDoc::new(pulse);
            d.j_e = Some(energy_cost(&d.pulse, *tf)?.j_e);
            d
        }
        SynthKind::Time {
            alpha0,
            alphaf,
            eps_max,
            eps_max_unit,
        } => {
            let sol: TimeOptimalSolution = min_time(&sys, *alpha0, *alphaf, eps_max_unit.to_rate(*eps_max))?;
            let pulse = synth_time_optimal(&sol, &sys)?;
            let mut d = PulseDoc::new(pulse);
            d.t_f_min = Some(sol.t_f_min);
            d.theta = Some(sol.theta);
            d.reachable = Some(sol.reachable);
            d.j_e = Some(energy_cost(&d.pulse, sol.t_f_min)?.j_e);
            d
        }
        SynthKind::Hahn(a) => {
            let spec = match a.omega0 {
                Some(omega0) => HahnSpec { omega0, t_f: a.tf },
                None => calibrate_hahn(&sys, a.alphaf_mod, a.tf)?,
            };
            let mut d = PulseDoc::new(hahn_pulse(&spec)?);
            d.j_e = Some(energy_cost(&d.pulse, a.tf)?.j_e);
            d.phase_error = Some(hahn_phase_error(&sys, &spec)?);
            d.quadratures = Some(Quadratures::of(&d.pulse, 2001));
            d
        }
        SynthKind::Cd(a) => {
            let omega0 = a.omega0.unwrap_or_else(|| adiabatic_amplitude(&sys, a.alphaf_mod));
            let base = hahn_pulse(&HahnSpec { omega0, t_f: a.tf })?;
            let mut d = PulseDoc::new(cd_transform(&base, &sys));
            d.j_e = Some(energy_cost(&d.pulse, a.tf)?.j_e);
            d.theta = Some(steady_state_phase(&sys));
            d.quadratures = Some(Quadratures::of(&d.pulse, 2001));
            d
        }
    };
    ctx.emit(&to_json(&doc)?)
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<()> {
    let sys = ctx.system()?;
    let doc = PulseDoc::load(&a.pulse)?;
    let t_f = a.tf.unwrap_or(doc.pulse.duration());
    let mut opts = SimOptions::default().with_kerr(a.kerr);
    opts.dt = a.dt;
    let traj = match a.fock_dim {
        Some(dim) => {
            let initial = FockState::coherent(a.alpha0, dim)?;
            let run = fock_oracle_from(&sys, &doc.pulse, initial, t_f, &opts)?;
            eprintln!(
                "fock: max trace error {:e}, max hermiticity error {:e}, max top population {:e}",
                run.max_trace_error, run.max_hermiticity_error, run.max_top_population
            );
            run.trajectory
        }
        None => integrate(&sys, &doc.pulse, a.alpha0, t_f, &opts)?,
    };
    let traj = match a.points {
        Some(n) => traj.decimate(n),
        None => traj,
    };
    ctx.emit(&csv_bytes(&traj)?)
}

fn analyze(ctx: &Ctx, a: &AnalyzeArgs) -> Result<()> {
    let sys = ctx.system()?;
    let doc = PulseDoc::load(&a.pulse)?;
    let t_f = doc.pulse.duration();
    let mut cost = energy_cost(&doc.pulse, t_f)?;
    let times = linspace(0.0, t_f, 2001);
    let traj = match trajectory_exact(&sys, &doc.pulse, a.alpha0, &times) {
        Ok(t) => t,
        Err(PulseError::UnsupportedVariant(_)) => integrate(&sys, &doc.pulse, a.alpha0, t_f, &SimOptions::default())?,
        Err(e) => return Err(e),
    };
    let last = traj.last().unwrap_or_default();
    if let Some(target) = a.alphaf {
        cost.target_residual = Some((last - target).norm() / target.norm().max(f64::MIN_POSITIVE));
    }
    let report = AnalyzeReport {
        variant: doc.pulse.name().to_string(),
        t_f,
        cost,
        final_alpha: [last.re, last.im],
        max_photon: traj.photon().into_iter().fold(0.0, f64::max),
        efficiency: efficiency(&traj).ok(),
    };
    ctx.emit(&to_json(&report)?)
}

fn readout(ctx: &Ctx, a: &ReadoutArgs) -> Result<()> {
    let params = ctx.dispersive(a.ncrit)?;
    let sign = if a.design_minus_chi { -1.0 } else { 1.0 };
    let pulse = match a.scheme {
        ReadoutScheme::Energy => design_energy_optimal(&params, a.tf, sign)?,
        ReadoutScheme::Time => {
            let eps = a.eps_max.ok_or_else(|| invalid("--scheme time needs --eps-max"))?;
            let unit = a
                .eps_max_unit
                .ok_or_else(|| invalid("--eps-max needs an explicit --eps-max-unit"))?;
            design_time_optimal(&params, unit.to_rate(eps), sign)?.0
        }
    };
    let mut opts = SimOptions::default().with_kerr(a.kerr);
    opts.dt = a.dt;
    let pair = readout_trajectories(&params, &pulse, &opts)?;
    if pair.dispersive_warning {
        eprintln!(
            "warning: max photon number {:.3} exceeds 1.1 n_crit = {:.3}; dispersive approximation questionable",
            pair.max_photon,
            1.1 * params.n_crit()
        );
    }
    let series = snr(&pair, &params, a.phi)?;
    let stride = (series.taus.len() - 1).div_ceil(a.points.max(1)).max(1);
    let last = series.taus.len() - 1;
    let keep = |i: usize| i.is_multiple_of(stride) || i == last;

    let mut out = String::from("tau_s,snr\n");
    for (i, (t, s)) in series.taus.iter().zip(&series.snr).enumerate() {
        if keep(i) {
            out.push_str(&format!("{t:e},{s:e}\n"));
        }
    }
    if let Some(path) = &a.iq_out {
        let mut iq = String::from("t_s,i_norm_e,q_norm_e,i_norm_g,q_norm_g\n");
        for (i, p) in iq_normalized(&pair).iter().enumerate() {
            if keep(i) {
                iq.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", p.t, p.i_e, p.q_e, p.i_g, p.q_g));
            }
        }
        write_atomic(path, iq.as_bytes())?;
    }
    ctx.emit(out.as_bytes())
}

fn robustness(ctx: &Ctx, a: &RobustnessArgs) -> Result<()> {
    let params = ctx.dispersive(Some(a.ncrit))?;
    let pulse = design_energy_optimal(&params, a.tf, 1.0)?;
    let axis = match a.axis {
        AxisArg::Resonator => MismatchAxis::Resonator,
        AxisArg::Qubit => MismatchAxis::Qubit,
    };
    let mut cfg = McConfig::new(axis, a.samples, ctx.seed).with_width(a.width);
    cfg.frame_offset = a.frame_offset;
    cfg.lo_angle = a.phi;
    let stats = mc_snr(&params, &pulse, &a.grid, &cfg)?;
    let mut out = String::from("mismatch,mean_snr,var_snr\n");
    for i in 0..stats.sweep_axis.len() {
        out.push_str(&format!("{:e},{:e},{:e}\n", stats.sweep_axis[i], stats.mean_snr[i], stats.var_snr[i]));
    }
    ctx.emit(out.as_bytes())
}

fn reproduce_cmd(ctx: &Ctx, a: &ReproduceArgs, argv: &[String]) -> Result<()> {
    let mut cfg = ReproConfig {
        seed: ctx.seed,
        ..ReproConfig::default()
    };
    if let Some(c) = &ctx.config {
        cfg = cfg.with_config(c)?;
    }
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    let figures: Vec<Figure> = if a.figure.eq_ignore_ascii_case("all") {
        Figure::ALL.to_vec()
    } else {
        vec![a.figure.parse()?]
    };
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    for fig in figures {
        let m = reproduce(fig, &cfg, &dir, argv.to_vec())?;
        for (file, sum) in &m.checksums {
            println!("{}  {}", sum, dir.join(file).display());
        }
    }
    Ok(())
}

/// Runs the parsed command.
pub fn execute(cli: &Cli, argv: &[String]) -> Result<()> {
    let config = cli.config.as_ref().map(Config::load).transpose()?;
    let ctx = Ctx {
        config,
        out: cli.out.clone(),
        seed: cli.seed,
    };
    match &cli.command {
        Command::Synth { kind } => synth(&ctx, kind),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Analyze(a) => analyze(&ctx, a),
        Command::Readout(a) => readout(&ctx, a),
        Command::Robustness(a) => robustness(&ctx, a),
        Command::Reproduce(a) => reproduce_cmd(&ctx, a, argv),
    }
}

pub fn exit_code(err: &PulseError) -> i32 {
    match err {
        PulseError::Unreachable(_) => 3,
        e if e.is_validation() => 2,
        _ => 1,
    }
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse::*;
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(duration("10us").unwrap(), 1e-5);
        assert_eq!(duration("2.5e-6s").unwrap(), 2.5e-6);
        assert_eq!(duration("3 ms").unwrap(), 3e-3);
        assert_eq!(duration("0.004").unwrap(), 0.004);
        assert!(duration("10 parsecs").is_err());
        assert!(duration("-1us").is_err());
    }

    #[test]
    fn complex_amplitudes() {
        assert_eq!(complex("3,-4").unwrap(), Complex64::new(3.0, -4.0));
        let z = complex("10@1.587461rad").unwrap();
        assert!((z.norm() - 10.0).abs() < 1e-12 && (z.arg() - 1.587461).abs() < 1e-12);
        assert!((complex("2@90deg").unwrap() - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        assert!(complex("2@1.5").is_err());
        assert!(complex("abc").is_err());
    }

    #[test]
    fn grids() {
        let g = grid("-0.2:0.2:41").unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!((g[0], g[40]), (-0.2, 0.2));
        assert!(g[20].abs() < 1e-16);
        assert!(grid("0:1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&PulseError::Unreachable("x".into())), 3);
        assert_eq!(exit_code(&invalid("x")), 2);
        assert_eq!(exit_code(&PulseError::Degenerate("x".into())), 1);
    }

    #[test]
    fn pulse_doc_round_trip() {
        let mut d = PulseDoc::new(Pulse::Hahn { omega0: 2.0, t_f: 1e-6 });
        d.j_e = Some(1.5e-6);
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"variant\":\"hahn\""));
        let back: PulseDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.pulse, d.pulse);
        assert_eq!(back.j_e, Some(1.5e-6));
    }
}
