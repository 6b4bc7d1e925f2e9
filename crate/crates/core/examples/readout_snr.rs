//! Dispersive readout: conditioned trajectories, SNR growth and LO phase.

use std::f64::consts::{PI, TAU};

use pulseforge::readout::{design_energy_optimal, lo_sweep, readout_trajectories, run_readout, simulate_homodyne_records};
use pulseforge::{DispersiveParams, SimOptions};

fn main() -> pulseforge::Result<()> {
    let opts = SimOptions::default();
    for n_crit in [1.0, 10.0, 100.0] {
        let p = DispersiveParams::for_critical_photon_number(n_crit, TAU * 6e9, TAU * 4e9, TAU * 1e4)?;
        let pulse = design_energy_optimal(&p, 1e-5, 1.0)?;
        let r = run_readout(&p, &pulse, 0.0, &opts)?;
        let (tau, peak) = r.snr.peak();
        println!("n_crit {n_crit:5}: chi {:.3e} rad/s  SNR(t_f) {:.4e}  peak {peak:.4e} at {:.2} us", p.chi(), r.snr.last(), tau * 1e6);
    }

    // a dispersive shift of κ/2 makes single shots distinguishable
    let (wr, wq, kappa) = (TAU * 6e9, TAU * 4e9, TAU * 1e4);
    let p = DispersiveParams::new(wr, wq, (0.5 * kappa * (wr - wq)).sqrt(), kappa)?;
    let pulse = design_energy_optimal(&p, 1e-5, 1.0)?;
    let pair = readout_trajectories(&p, &pulse, &opts)?;
    let angles: Vec<f64> = (0..8).map(|k| k as f64 * PI / 8.0).collect();
    let sweep = lo_sweep(&pair, &p, &angles)?;
    let best = angles[sweep.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
    println!("chi = kappa/2: LO sweep {:.3?}", sweep);
    let stats = simulate_homodyne_records(&pair, &pulse, &p, best, &[1e-5], 10_000, 7, 1.0)?;
    println!("10^4 shots at phi = {best:.3}: SNR {:.3} (analytic {:.3})", stats.snr[0], sweep.iter().cloned().fold(0.0, f64::max));
    Ok(())
}
