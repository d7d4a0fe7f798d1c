//! Extraction of the boundary traces `g₀ = lim |x|^{α/2} g` and
//! `g₁ = lim |x|^{-(1+α/2)} (g - g₀ |x|^{-α/2})` from samples near `x = 0`.
//!
//! Near the origin a function in the operator domain behaves like
//! `|x|^{α/2} g = g₀ (1 + O(x²)) + g₁ |x|^{1+α} (1 + O(x²))`, so the limits are
//! obtained by a least-squares fit with these known exponents (a generalised
//! Richardson extrapolation).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceFit {
    pub g0: Complex64,
    pub g1: Complex64,
    /// Largest change of either limit between two fitting windows.
    pub spread: f64,
}

fn exponents(alpha: f64) -> [f64; 4] {
    [0.0, 1.0 + alpha, 2.0, 3.0 + alpha]
}

fn least_squares(xs: &[f64], ys: &[Complex64], alpha: f64, terms: usize) -> Result<(Complex64, Complex64)> {
    if xs.len() < terms + 2 {
        return Err(Error::TraceExtrapolation(format!(
            "{} samples are too few for a {terms}-term fit",
            xs.len()
        )));
    }
    let exps = &exponents(alpha)[..terms];
    let scale: Vec<f64> = exps
        .iter()
        .map(|&e| xs.iter().map(|&x| x.powf(e)).fold(0.0, f64::max))
        .collect();
    let m = DMatrix::from_fn(xs.len(), terms, |i, j| xs[i].powf(exps[j]) / scale[j]);
    let svd = m.svd(true, true);
    let re = DVector::from_iterator(ys.len(), ys.iter().map(|y| y.re));
    let im = DVector::from_iterator(ys.len(), ys.iter().map(|y| y.im));
    let solve = |b: &DVector<f64>| {
        svd.solve(b, 1e-14)
            .map_err(|e| Error::TraceExtrapolation(e.to_string()))
    };
    let (cr, ci) = (solve(&re)?, solve(&im)?);
    Ok((
        Complex64::new(cr[0], ci[0]) / scale[0],
        Complex64::new(cr[1], ci[1]) / scale[1],
    ))
}

/// Fits the traces of `g` from samples `(x, g(x))` with `x > 0` small
/// (the side is irrelevant: pass `|x|`).
pub fn fit_traces(xs: &[f64], values: &[Complex64], alpha: f64) -> Result<TraceFit> {
    if xs.len() != values.len() || xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter(
            "trace fit needs matching samples at positive |x|".into(),
        ));
    }
    let ys: Vec<Complex64> = xs
        .iter()
        .zip(values)
        .map(|(&x, &v)| v * x.powf(0.5 * alpha))
        .collect();
    let (g0, g1) = least_squares(xs, &ys, alpha, 4)?;

    // second opinion: drop the outer third of the window and one basis term
    let cut = xs.iter().cloned().fold(0.0, f64::max) / 3.0;
    let (inner_x, inner_y): (Vec<f64>, Vec<Complex64>) = xs
        .iter()
        .zip(&ys)
        .filter(|(&x, _)| x <= cut)
        .map(|(&x, &y)| (x, y))
        .unzip();
    let (h0, h1) = least_squares(&inner_x, &inner_y, alpha, 3)?;
    let spread = (g0 - h0).norm().max((g1 - h1).norm());

    let magnitude = g0.norm().max(g1.norm());
    if magnitude > 0.0 && spread > 0.1 * magnitude {
        return Err(Error::TraceExtrapolation(format!(
            "spread {spread:e} exceeds 10% of the trace magnitude {magnitude:e}"
        )));
    }
    Ok(TraceFit { g0, g1, spread })
}

/// Geometric sample abscissae `hi, hi·q, …` down to `lo`.
pub fn geometric_points(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = hi;
    while x >= lo {
        out.push(x);
        x *= ratio;
    }
    out
}
