#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pulseforge::lin_control::SystemMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn reference_system() -> SystemMatrix {
    SystemMatrix::new(TAU * 0.3e6, TAU * 1e4).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct Instance {
    pub sys: SystemMatrix,
    pub alpha0: Complex64,
    pub alpha_f: Complex64,
    pub t_f: f64,
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let omega = TAU * rng.random_range(-1e6..1e6);
    let kappa = TAU * rng.random_range(1e3..1e5);
    let c = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
    Instance {
        sys: SystemMatrix::new(omega, kappa).unwrap(),
        alpha0: c(rng),
        alpha_f: c(rng),
        t_f: rng.random_range(0.5e-6..20e-6),
    }
}

/// Least-norm piecewise-constant steering on `steps` bins via the
/// Moore-Penrose pseudoinverse of the 2 x 2M real endpoint map.
pub struct DiscreteOracle {
    pub controls: DVector<f64>,
    pub map: DMatrix<f64>,
    pub pinv: DMatrix<f64>,
    pub h: f64,
}

impl DiscreteOracle {
    pub fn solve(inst: &Instance, steps: usize) -> Self {
        let lam = inst.sys.eigenvalue();
        let h = inst.t_f / steps as f64;
        let bin = ((lam * h).exp() - 1.0) / lam;
        let mut map = DMatrix::zeros(2, 2 * steps);
        for k in 0..steps {
            // α(t_f) = e^{λt_f}α₀ − Σ g_k ε_k
            let g = (lam * (inst.t_f - (k + 1) as f64 * h)).exp() * bin;
            map[(0, 2 * k)] = -g.re;
            map[(0, 2 * k + 1)] = g.im;
            map[(1, 2 * k)] = -g.im;
            map[(1, 2 * k + 1)] = -g.re;
        }
        let gap = inst.alpha_f - (lam * inst.t_f).exp() * inst.alpha0;
        let b = DVector::from_vec(vec![gap.re, gap.im]);
        let pinv = map.clone().pseudo_inverse(1e-300).expect("svd");
        let controls = &pinv * b;
        Self { controls, map, pinv, h }
    }

    pub fn cost(&self) -> f64 {
        self.h * self.controls.norm_squared()
    }

    /// Another feasible control: the least-norm one plus a null-space step.
    pub fn perturbed_cost(&self, rng: &mut ChaCha8Rng, size: f64) -> f64 {
        let r = DVector::from_fn(self.controls.len(), |_, _| size * rng.random_range(-1.0..1.0));
        let null = &r - &self.pinv * (&self.map * &r);
        self.h * (&self.controls + null).norm_squared()
    }
}

/// Coefficient of determination of a least-squares line through (x, y).
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    1.0 - ss_res / ss_tot
}
