//! Empirical decay exponents of `‖u(t)‖_p` and `‖∂ₓu(t)‖_p`.
//!
//! The classical benchmark `‖e^{tΔ}‖_{L^r → L^p} ≍ t^{−(1/r − 1/p)/2}` is an
//! operator-norm statement: a single datum decays at that rate only
//! asymptotically. [`classical_operator_norm`] therefore takes the supremum
//! of `‖u(t)‖_p / ‖φ‖_r` over centred Gaussians of widths spanning five
//! decades.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{classical_heat_evolve, lp_norm, InitialDatum, Propagator};
use crate::grid::{SampledFunction, SpatialGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Slope of `log ‖·‖` against `log t` (negative for decay).
    pub exponent: f64,
    pub prefactor: f64,
    /// RMS of the log residuals.
    pub fit_residual: f64,
    pub time_window: (f64, f64),
    pub p: f64,
    pub r: f64,
}

/// `−(1/r − 1/p)/2`, the classical exponent.
pub fn target_exponent(p: f64, r: f64) -> f64 {
    -0.5 * (1.0 / r - 1.0 / p)
}

/// `−(1/r − 1/p + 1)/2`, the classical gradient exponent.
pub fn gradient_target_exponent(p: f64, r: f64) -> f64 {
    -0.5 * (1.0 / r - 1.0 / p + 1.0)
}

/// Least-squares power law through `(t, value)` samples.
pub fn decay_rate_fit(norms: &[(f64, f64)], p: f64, r: f64) -> Result<DecayFit> {
    if norms.len() < 5 {
        return Err(Error::DegenerateFit(format!("{} samples, need at least 5", norms.len())));
    }
    if norms.iter().any(|&(t, v)| !(t > 0.0) || !(v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit("times and values must be positive".into()));
    }
    if norms.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::DegenerateFit("times must be strictly increasing".into()));
    }
    let n = norms.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = norms.iter().map(|&(t, v)| (t.ln(), v.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all times coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    Ok(DecayFit {
        exponent: slope,
        prefactor: icept.exp(),
        fit_residual: (rss / n).sqrt(),
        time_window: (norms[0].0, norms[norms.len() - 1].0),
        p,
        r,
    })
}

/// `n` log-spaced times in `[lo, hi]`.
pub fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1).max(1) as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientNorm {
    pub value: f64,
    /// Relative gap to the same norm from the wider (`i ± 2`) stencil.
    pub richardson_gap: f64,
    /// The gap exceeds 5 %.
    pub grid_too_coarse: bool,
}

/// Three-point derivative at `x[i]` from the nodes `x[j]` in `stencil`.
fn three_point(xs: &[f64], vs: &[Complex64], i: usize, stencil: [usize; 3]) -> Complex64 {
    let x0 = xs[i];
    let [a, b, c] = stencil;
    // derivative of the Lagrange interpolant through a, b, c at x0
    let la = ((x0 - xs[b]) + (x0 - xs[c])) / ((xs[a] - xs[b]) * (xs[a] - xs[c]));
    let lb = ((x0 - xs[a]) + (x0 - xs[c])) / ((xs[b] - xs[a]) * (xs[b] - xs[c]));
    let lc = ((x0 - xs[a]) + (x0 - xs[b])) / ((xs[c] - xs[a]) * (xs[c] - xs[b]));
    vs[a] * la + vs[b] * lb + vs[c] * lc
}

/// Derivative along one half-line; the stencil never leaves it.
fn half_line_derivative(xs: &[f64], vs: &[Complex64], reach: usize) -> Vec<Complex64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let st = if i >= reach && i + reach < n {
                [i - reach, i, i + reach]
            } else if i < reach {
                [i, i + reach, i + 2 * reach]
            } else {
                [i - 2 * reach, i - reach, i]
            };
            three_point(xs, vs, i, st)
        })
        .collect()
}

/// `∂ₓu` on the grid by finite differences within each half-line.
pub fn gradient(u: &SampledFunction) -> SampledFunction {
    gradient_with_reach(u, 1)
}

fn gradient_with_reach(u: &SampledFunction, reach: usize) -> SampledFunction {
    let grid = u.grid();
    let xs = grid.half_nodes();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for positive in [true, false] {
        let side = u.side(positive);
        // in |x|, the derivative on the left flips sign
        let d = half_line_derivative(xs, &side, reach);
        for (j, dv) in d.into_iter().enumerate() {
            values[grid.index_of(j, positive)] = if positive { dv } else { -dv };
        }
    }
    SampledFunction::new(Arc::clone(grid), values, u.time()).expect("finite differences of finite data")
}

/// `‖∂ₓu‖_p`. For `p = ∞` the innermost panel on each side is excluded,
/// where `u` may blow up like `|x|^{−α/2}`.
pub fn gradient_norm(u: &SampledFunction, p: f64) -> Result<GradientNorm> {
    let norm = |du: &SampledFunction| -> Result<f64> {
        if p.is_infinite() {
            let grid = du.grid();
            let skip = grid.rule().order();
            let mut m: f64 = 0.0;
            for positive in [true, false] {
                for v in du.side(positive).iter().skip(skip) {
                    m = m.max(v.norm());
                }
            }
            Ok(m)
        } else {
            lp_norm(du, p)
        }
    };
    let value = norm(&gradient_with_reach(u, 1))?;
    let wide = norm(&gradient_with_reach(u, 2))?;
    let gap = if value > 0.0 { (value - wide).abs() / value } else { 0.0 };
    Ok(GradientNorm {
        value,
        richardson_gap: gap,
        grid_too_coarse: gap > 0.05,
    })
}

/// `sup |x|^{α/2} |u(x)|`, finite for the bridging flow although `u` itself
/// may blow up at the origin.
pub fn weighted_sup(u: &SampledFunction, alpha: f64) -> f64 {
    let grid = u.grid();
    u.values()
        .iter()
        .enumerate()
        .map(|(i, v)| grid.point(i).abs().powf(0.5 * alpha) * v.norm())
        .fold(0.0, f64::max)
}

/// Widths of the centred Gaussian probes.
pub fn probe_widths() -> Vec<f64> {
    log_times(1e-2, 1e3, 41)
}

/// `‖e^{−(x/w)²}‖_r = (w √(π/r))^{1/r}`; the narrow probes are not resolved
/// by grids sized for the evolved profile.
fn gaussian_lp_norm(width: f64, r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else {
        (width * (std::f64::consts::PI / r).sqrt()).powf(1.0 / r)
    }
}

fn probe_grid(width: f64, t: f64) -> Result<Arc<SpatialGrid>> {
    let spread = (width * width + 4.0 * t).sqrt();
    let grid = SpatialGrid::builder()
        .length(10.0 * spread)
        .panel_width(0.25 * spread)
        .inner_radius(1e-6 * spread)
        .build()?;
    Ok(Arc::new(grid))
}

/// `sup_φ ‖e^{tΔ}φ‖_p / ‖φ‖_r` over centred Gaussians.
pub fn classical_operator_norm(t: f64, p: f64, r: f64) -> Result<f64> {
    let ratios: Vec<f64> = probe_widths()
        .par_iter()
        .map(|&w| {
            let datum = InitialDatum::gaussian(0.0, w);
            let grid = probe_grid(w, t)?;
            let u = classical_heat_evolve(t, &datum, &grid)?;
            Ok(lp_norm(&u, p)? / gaussian_lp_norm(w, r))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

pub fn classical_decay_fit(p: f64, r: f64, times: &[f64]) -> Result<DecayFit> {
    let norms = times
        .iter()
        .map(|&t| Ok((t, classical_operator_norm(t, p, r)?)))
        .collect::<Result<Vec<_>>>()?;
    decay_rate_fit(&norms, p, r)
}

/// Decay of a single classical solution.
pub fn classical_datum_fit(datum: &InitialDatum, grid: &Arc<SpatialGrid>, p: f64, r: f64, times: &[f64]) -> Result<DecayFit> {
    let norms = times
        .iter()
        .map(|&t| Ok((t, lp_norm(&classical_heat_evolve(t, datum, grid)?, p)?)))
        .collect::<Result<Vec<_>>>()?;
    decay_rate_fit(&norms, p, r)
}

/// Norms of one bridging solution at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgingNorms {
    pub t: f64,
    pub l2: f64,
    pub weighted_sup: f64,
    /// `‖∂ₓ(|x|^{α/2} u)‖₂`; `∂ₓu` itself is not square integrable for `α > 0`.
    pub weighted_gradient_l2: f64,
}

/// Evidence for the bridging flow: `‖u‖₂`, `sup |x|^{α/2}|u|` and
/// `‖∂ₓ(|x|^{α/2}u)‖₂`
/// along `times`, with power-law fits of each.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgingDecay {
    pub samples: Vec<BridgingNorms>,
    pub l2_fit: DecayFit,
    pub weighted_sup_fit: DecayFit,
    pub gradient_fit: DecayFit,
}

pub fn bridging_decay(prop: &Propagator, datum: &InitialDatum, grid: &Arc<SpatialGrid>, times: &[f64]) -> Result<BridgingDecay> {
    let alpha = prop.alpha().value();
    let phi = datum.sample(grid)?;
    let r = 2.0;
    let norm_phi = lp_norm(&phi, r)?;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let u = prop.evolve(t, datum, grid)?.solution;
        samples.push(BridgingNorms {
            t,
            l2: lp_norm(&u, 2.0)? / norm_phi,
            weighted_sup: weighted_sup(&u, alpha) / norm_phi,
            weighted_gradient_l2: gradient_norm(&u.map(|x, v| v * x.abs().powf(0.5 * alpha)), 2.0)?.value / norm_phi,
        });
    }
    let fit = |f: fn(&BridgingNorms) -> f64, p: f64| {
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, f(s))).collect();
        decay_rate_fit(&pts, p, r)
    };
    Ok(BridgingDecay {
        l2_fit: fit(|s| s.l2, 2.0)?,
        weighted_sup_fit: fit(|s| s.weighted_sup, f64::INFINITY)?,
        gradient_fit: fit(|s| s.weighted_gradient_l2, 2.0)?,
        samples,
    })
}
