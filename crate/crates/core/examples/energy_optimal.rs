//! Minimum-energy drive that fills the resonator with |α| = 10 in 10 μs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use pulseforge::dynamics::integrate;
use pulseforge::lin_control::{energy_cost, synth_energy_optimal, SystemMatrix};
use pulseforge::SimOptions;

fn main() -> pulseforge::Result<()> {
    let sys = SystemMatrix::new(TAU * 0.3e6, TAU * 1e4)?;
    let (alpha0, alpha_f, t_f) = (Complex64::new(0.0, 0.0), Complex64::new(10.0, 0.0), 1e-5);

    let pulse = synth_energy_optimal(&sys, alpha0, alpha_f, t_f)?;
    let traj = integrate(&sys, &pulse, alpha0, t_f, &SimOptions::default())?;
    let cost = energy_cost(&pulse, t_f)?;

    println!("J_E            = {:.6e} 1/s", cost.j_e);
    println!("alpha(t_f)     = {:.9}", traj.last().unwrap());
    println!("endpoint error = {:.3e}", (traj.last().unwrap() - alpha_f).norm());
    for (t, eps) in pulse.sample(6) {
        println!("  t = {:5.2} us  eps = {:.4e}", t * 1e6, eps);
    }
    Ok(())
}
