//! Truncated master-equation run compared with the coherent-state equation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use pulseforge::dynamics::{fock_oracle, integrate};
use pulseforge::lin_control::{synth_energy_optimal, SystemMatrix};
use pulseforge::SimOptions;

fn main() -> pulseforge::Result<()> {
    let sys = SystemMatrix::new(TAU * 0.3e6, TAU * 1e4)?;
    let zero = Complex64::new(0.0, 0.0);
    let t_f = 5e-6;
    let pulse = synth_energy_optimal(&sys, zero, Complex64::new(2.0, 1.0), t_f)?;
    let opts = SimOptions::default();

    let run = fock_oracle(&sys, &pulse, 30, t_f, &opts)?;
    let mean_field = integrate(&sys, &pulse, zero, t_f, &opts)?;
    let gap = (run.trajectory.last().unwrap() - mean_field.last().unwrap()).norm();

    println!("<a>(t_f) fock      = {:.9}", run.trajectory.last().unwrap());
    println!("alpha(t_f)         = {:.9}", mean_field.last().unwrap());
    println!("difference         = {gap:.3e}");
    println!("trace error        = {:.3e}", run.max_trace_error);
    println!("top-level weight   = {:.3e}", run.max_top_population);
    println!("min eigenvalue     = {:.3e}", run.final_state.min_eigenvalue());
    println!("purity             = {:.9}", run.final_state.purity());
    Ok(())
}
