//! Truncated-Fock master equation used as an independent check of the
//! Langevin trajectories:
//!
//! ```text
//! dρ/dt = i[ρ, H] + (κ/2)(2aρa† − ρa†a − a†aρ),   H = ω a†a + i(ε* a − ε a†)
//! ```
//!
//! Matrix elements are updated directly from the ladder-operator action, so
//! one right-hand-side evaluation costs O(N²). The diagonal part
//! `−iω(j−k) − κ(j+k)/2` is propagated exactly (integrating-factor RK4),
//! leaving the drive and the jump term to the explicit stages.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_span, default_step, step_count};
use crate::error::{invalid, PulseError, Result};
use crate::lin_control::SystemMatrix;
use crate::model::{ComplexAmplitude, SimOptions, Trajectory};
use crate::pulse::Pulse;

const OVERFLOW_LIMIT: f64 = 1e-6;

/// Density matrix on the Fock states `|0⟩ … |N−1⟩`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    dim: usize,
    rho: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("Fock dimension must be at least 2"));
        }
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        rho[0] = Complex64::new(1.0, 0.0);
        Ok(Self { dim, rho })
    }

    /// Coherent state |α⟩ truncated to `dim` levels and renormalised.
    pub fn coherent(alpha: ComplexAmplitude, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("Fock dimension must be at least 2"));
        }
        let mut amp = Vec::with_capacity(dim);
        let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..dim {
            amp.push(c);
            c *= alpha / ((n + 1) as f64).sqrt();
        }
        let norm: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            for k in 0..dim {
                rho[j * dim + k] = amp[j] * amp[k].conj() / norm;
            }
        }
        Ok(Self { dim, rho })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn element(&self, j: usize, k: usize) -> Complex64 {
        self.rho[j * self.dim + k]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|j| self.element(j, j)).sum()
    }

    /// Tr[ρ²].
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨a⟩ = Tr[aρ] = Σ √(j+1) ρ_{j+1, j}.
    pub fn mean_field(&self) -> Complex64 {
        (0..self.dim - 1)
            .map(|j| ((j + 1) as f64).sqrt() * self.element(j + 1, j))
            .sum()
    }

    /// Largest |ρ − ρ†| element.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim {
            for k in j..self.dim {
                worst = worst.max((self.element(j, k) - self.element(k, j).conj()).norm());
            }
        }
        worst
    }

    pub fn top_population(&self) -> f64 {
        self.element(self.dim - 1, self.dim - 1).re
    }

    /// Smallest eigenvalue of the Hermitian part of ρ.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |j, k| 0.5 * (self.element(j, k) + self.element(k, j).conj()));
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Output of a master-equation run.
#[derive(Clone, Debug)]
pub struct FockRun {
    /// ⟨a⟩(t) on the integration grid.
    pub trajectory: Trajectory,
    pub final_state: FockState,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub max_top_population: f64,
}

/// Master-equation run from the vacuum.
pub fn fock_oracle(sys: &SystemMatrix, pulse: &Pulse, dim: usize, t_f: f64, opts: &SimOptions) -> Result<FockRun> {
    fock_oracle_from(sys, pulse, FockState::vacuum(dim)?, t_f, opts)
}

pub fn fock_oracle_from(
    sys: &SystemMatrix,
    pulse: &Pulse,
    initial: FockState,
    t_f: f64,
    opts: &SimOptions,
) -> Result<FockRun> {
    opts.validate()?;
    check_span(pulse, t_f)?;
    let dim = initial.dim;
    let (omega, kappa) = (sys.rotation_rate, sys.kappa);

    let peak = pulse
        .sample(256)
        .iter()
        .map(|(_, e)| e.norm())
        .fold(0.0f64, f64::max);
    // explicit stages see the drive (~ε√N) and the jump term (~κN)
    let stable = 1.0 / (kappa * dim as f64 + 2.0 * peak * (dim as f64).sqrt());
    let dt = opts.dt.unwrap_or_else(|| default_step(sys, t_f)).min(stable);
    let n = step_count(t_f, dt);
    let h = t_f / n as f64;

    let diag: Vec<Complex64> = (0..dim * dim)
        .map(|idx| {
            let (j, k) = ((idx / dim) as f64, (idx % dim) as f64);
            Complex64::new(-0.5 * kappa * (j + k), -omega * (j - k))
        })
        .collect();
    let half: Vec<Complex64> = diag.iter().map(|d| (d * 0.5 * h).exp()).collect();
    let full: Vec<Complex64> = diag.iter().map(|d| (d * h).exp()).collect();
    let sq: Vec<f64> = (0..=dim).map(|j| (j as f64).sqrt()).collect();

    // Non-diagonal part of the Liouvillian.
    let rhs = |eps: Complex64, rho: &[Complex64], out: &mut [Complex64]| {
        let ec = eps.conj();
        let at = |j: usize, k: usize| rho[j * dim + k];
        for j in 0..dim {
            for k in 0..dim {
                let mut v = Complex64::new(0.0, 0.0);
                if j + 1 < dim {
                    v += ec * sq[j + 1] * at(j + 1, k);
                    if k + 1 < dim {
                        v += kappa * sq[j + 1] * sq[k + 1] * at(j + 1, k + 1);
                    }
                }
                if k >= 1 {
                    v -= ec * sq[k] * at(j, k - 1);
                }
                if j >= 1 {
                    v -= eps * sq[j] * at(j - 1, k);
                }
                if k + 1 < dim {
                    v += eps * sq[k + 1] * at(j, k + 1);
                }
                out[j * dim + k] = v;
            }
        }
    };

    let len = dim * dim;
    let mut rho = initial.rho.clone();
    let mut k1 = vec![Complex64::new(0.0, 0.0); len];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut stage = k1.clone();

    let mut state = initial;
    let mut times = Vec::with_capacity(n + 1);
    let mut alphas = Vec::with_capacity(n + 1);
    let mut max_trace_error = (state.trace() - 1.0).norm();
    let mut max_herm = state.hermiticity_error();
    let mut max_top = state.top_population();
    times.push(0.0);
    alphas.push(state.mean_field());

    for step in 0..n {
        let t = step as f64 * h;
        let (e0, em, e1) = (pulse.eval(t), pulse.eval(t + 0.5 * h), pulse.eval(t + h));
        if ![e0, em, e1].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(PulseError::NonFinite("pulse"));
        }
        rhs(e0, &rho, &mut k1);
        for i in 0..len {
            stage[i] = half[i] * (rho[i] + 0.5 * h * k1[i]);
        }
        rhs(em, &stage, &mut k2);
        for i in 0..len {
            stage[i] = half[i] * rho[i] + 0.5 * h * k2[i];
        }
        rhs(em, &stage, &mut k3);
        for i in 0..len {
            stage[i] = full[i] * rho[i] + h * half[i] * k3[i];
        }
        rhs(e1, &stage, &mut k4);
        for i in 0..len {
            rho[i] = full[i] * rho[i] + h / 6.0 * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]);
        }

        state.rho.copy_from_slice(&rho);
        let top = state.top_population();
        if top > OVERFLOW_LIMIT {
            return Err(PulseError::TruncationOverflow { population: top });
        }
        max_top = max_top.max(top);
        max_trace_error = max_trace_error.max((state.trace() - 1.0).norm());
        max_herm = max_herm.max(state.hermiticity_error());
        times.push(if step + 1 == n { t_f } else { (step + 1) as f64 * h });
        alphas.push(state.mean_field());
    }

    Ok(FockRun {
        trajectory: Trajectory::new(times, alphas)?,
        final_state: state,
        max_trace_error,
        max_hermiticity_error: max_herm,
        max_top_population: max_top,
    })
}
