//! Bang-bang minimal-time fill at a fixed drive bound.

use std::f64::consts::TAU;

use num_complex::Complex64;
use pulseforge::dynamics::response_exact;
use pulseforge::lin_control::SystemMatrix;
use pulseforge::time_optimal::{min_time, reachable_radius, synth_time_optimal};

fn main() -> pulseforge::Result<()> {
    let sys = SystemMatrix::new(TAU * 0.3e6, TAU * 1e4)?;
    let zero = Complex64::new(0.0, 0.0);
    let target = Complex64::new(10.0, 0.0);

    for eps_max in [4e5, 1e6, 1e7, 1e8] {
        let sol = min_time(&sys, zero, target, eps_max)?;
        let pulse = synth_time_optimal(&sol, &sys)?;
        let reached = response_exact(&sys, &pulse, zero, sol.t_f_min)?;
        println!(
            "eps_max {eps_max:8.1e}  t_min {:.6e} s  theta {:.4}  r(t_min) {:.4}  miss {:.1e}",
            sol.t_f_min,
            sol.theta,
            reachable_radius(&sys, eps_max, sol.t_f_min),
            (reached - target).norm()
        );
    }
    // below κ|α_f|/2 the target is never reached
    let sol = min_time(&sys, zero, target, 1e5)?;
    println!("eps_max    1.0e5  reachable {}  t_min {}", sol.reachable, sol.t_f_min);
    Ok(())
}
