//! Quantum-speed-limit efficiency of the optimal and time-optimal fills.

use std::f64::consts::TAU;

use num_complex::Complex64;
use pulseforge::dynamics::integrate;
use pulseforge::lin_control::{synth_energy_optimal, SystemMatrix};
use pulseforge::metrics::efficiency;
use pulseforge::time_optimal::{eps_max_for_duration, min_time, synth_time_optimal};
use pulseforge::SimOptions;

fn main() -> pulseforge::Result<()> {
    let sys = SystemMatrix::new(TAU * 0.3e6, TAU * 1e4)?;
    let zero = Complex64::new(0.0, 0.0);
    let target = Complex64::new(10.0, 0.0);
    let opts = SimOptions::default();
    println!("{:>8} {:>10} {:>10} {:>10}", "t_f/us", "eta_opt", "eta_time", "bound");
    for t_f in [1e-6, 1e-5, 1e-4] {
        let eo = integrate(&sys, &synth_energy_optimal(&sys, zero, target, t_f)?, zero, t_f, &opts)?;
        let sol = min_time(&sys, zero, target, eps_max_for_duration(&sys, 10.0, t_f)?)?;
        let to = integrate(&sys, &synth_time_optimal(&sol, &sys)?, zero, sol.t_f_min, &opts)?;
        let (a, b) = (efficiency(&eo)?, efficiency(&to)?);
        println!("{:8.1} {:10.6} {:10.6} {:10.6}", t_f * 1e6, a.eta, b.eta, a.eta_bound);
    }
    Ok(())
}
