//! Composite Simpson quadrature with Richardson refinement, plus sampled-data
//! rules used on trajectory grids.

use crate::error::{PulseError, Result};

const MIN_PANELS: usize = 64;
const MAX_PANELS: usize = 1 << 24;

/// Composite Simpson on `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n.max(2) };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

/// Doubles the panel count until the Richardson error estimate drops below
/// `rel_tol` (relative to the result, with a tiny absolute floor).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut n = MIN_PANELS;
    let mut coarse = simpson(&f, a, b, n);
    loop {
        n *= 2;
        let fine = simpson(&f, a, b, n);
        let err = (fine - coarse) / 15.0;
        if !fine.is_finite() {
            return Err(PulseError::NonFinite("quadrature integrand"));
        }
        if err.abs() <= rel_tol * fine.abs() || err.abs() < 1e-300 {
            return Ok(fine + err);
        }
        if n >= MAX_PANELS {
            return Err(PulseError::Degenerate(format!(
                "quadrature did not reach rel_tol {rel_tol:e} (estimate {:e})",
                (err / fine).abs()
            )));
        }
        coarse = fine;
    }
}

/// Running trapezoid integral; `out[0] = 0`.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    if !xs.is_empty() {
        out.push(0.0);
    }
    for i in 1..xs.len() {
        acc += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
        out.push(acc);
    }
    out
}

/// Simpson's rule on samples, falling back to the trapezoid on a trailing
/// odd interval. Spacing may be non-uniform; each pair of intervals uses the
/// three-point rule for unequal widths.
pub fn simpson_samples(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h0 = xs[i + 1] - xs[i];
        let h1 = xs[i + 2] - xs[i + 1];
        let hs = h0 + h1;
        acc += hs / 6.0
            * (ys[i] * (2.0 - h1 / h0) + ys[i + 1] * hs * hs / (h0 * h1) + ys[i + 2] * (2.0 - h0 / h1));
        i += 2;
    }
    if i + 1 < n {
        acc += 0.5 * (xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]);
    }
    acc
}
