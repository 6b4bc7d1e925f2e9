//! Mean SNR under resonator and qubit frequency mismatch.

use std::f64::consts::TAU;

use pulseforge::readout::{design_energy_optimal, snr_exact};
use pulseforge::repro::linspace;
use pulseforge::robustness::{mc_snr, McConfig, MismatchAxis};
use pulseforge::DispersiveParams;

fn main() -> pulseforge::Result<()> {
    let grid = linspace(-0.2, 0.2, 9);
    for n_crit in [1.0, 10.0, 100.0] {
        let p = DispersiveParams::for_critical_photon_number(n_crit, TAU * 6e9, TAU * 4e9, TAU * 1e4)?;
        let pulse = design_energy_optimal(&p, 1e-5, 1.0)?;
        let nominal = snr_exact(&p, &pulse, 0.0, 1e-5)?;
        for axis in [MismatchAxis::Resonator, MismatchAxis::Qubit] {
            let stats = mc_snr(&p, &pulse, &grid, &McConfig::new(axis, 500, 42))?;
            let worst = stats.relative_degradation(nominal).into_iter().fold(f64::MIN, f64::max);
            println!("n_crit {n_crit:5} {axis:?}: nominal {nominal:.3e}, worst degradation {:.1}%", 100.0 * worst);
        }
    }
    Ok(())
}
