//! Hahn ramp and its counterdiabatic correction against the optimal drive.

use std::f64::consts::TAU;

use num_complex::Complex64;
use pulseforge::baselines::{adiabatic_amplitude, calibrate_hahn, cd_transform, hahn_pulse, HahnSpec};
use pulseforge::dynamics::response_exact;
use pulseforge::lin_control::{energy_cost, optimal_energy, SystemMatrix};

fn main() -> pulseforge::Result<()> {
    let sys = SystemMatrix::new(TAU * 0.3e6, TAU * 1e4)?;
    let zero = Complex64::new(0.0, 0.0);
    let omega0 = adiabatic_amplitude(&sys, 10.0);
    println!("adiabatic amplitude {omega0:.6e} rad/s");
    println!("{:>8} {:>12} {:>12} {:>12} {:>8} {:>8}", "t_f/us", "J_opt", "J_hahn", "J_cd", "|a|hahn", "|a|cd");
    for t_f in [1e-6, 5e-6, 2e-5, 1e-4] {
        let hahn = hahn_pulse(&calibrate_hahn(&sys, 10.0, t_f)?)?;
        let cd = cd_transform(&hahn_pulse(&HahnSpec { omega0, t_f })?, &sys);
        let j_opt = optimal_energy(&sys, zero, Complex64::from_polar(10.0, response_exact(&sys, &hahn, zero, t_f)?.arg()), t_f)?;
        println!(
            "{:8.1} {:12.4e} {:12.4e} {:12.4e} {:8.4} {:8.4}",
            t_f * 1e6,
            j_opt,
            energy_cost(&hahn, t_f)?.j_e,
            energy_cost(&cd, t_f)?.j_e,
            response_exact(&sys, &hahn, zero, t_f)?.norm(),
            response_exact(&sys, &cd, zero, t_f)?.norm(),
        );
    }
    Ok(())
}
