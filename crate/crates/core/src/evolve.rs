//! Solution `u(t) = e^{−tA} φ` of the bridging heat equation on a graded grid.
//!
//! The contour integral and the spatial integral are swapped: at every
//! contour node `z` the function `g = (A − z)^{-1} φ` is computed on the whole
//! grid at once, using that the Green function is separable,
//!
//! ```text
//! g(x) = (iπ/4) [P(x) ∫_0^x Q φ + Q(x) ∫_x^L P φ] + c P(x) (S⁺ + S⁻),
//! ```
//!
//! so that both cumulative integrals are single sweeps over the panels. `P`
//! and `Q` depend on `|x|` only and are shared by the two half-lines.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{Contour, ContourKind, DEFAULT_NODES, MAX_NODES};
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, SpatialGrid};
use crate::resolvent::{coupling_shape, half_line_pair, CouplingMode, HalfLinePair, SpectralPoint};
use crate::traces::fit_traces;
use crate::Alpha;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest `Im√z · panel width` the panel interpolation tolerates
/// (degree-15 interpolation of `e^{λy}` is good to about 1e-10 there).
pub const MAX_PANEL_DECAY: f64 = 6.0;
/// Allowed L² tail of the datum outside `[−L, L]`, relative to `‖φ‖₂`.
pub const TAIL_BUDGET: f64 = 1e-8;
/// Contour nodes whose weight is below this fraction of the largest one are
/// ignored when judging whether panels resolve the decay rate.
const SIGNIFICANT_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// `e^{i·momentum·x} e^{−((x − center)/width)²}`
    Gaussian { center: f64, width: f64, momentum: f64 },
    /// Indicator of `[lo, hi]`.
    Indicator { lo: f64, hi: f64 },
    /// Values on the grid the datum is evolved on.
    Samples(Vec<Complex64>),
}

impl InitialDatum {
    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::Gaussian {
            center,
            width,
            momentum: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Gaussian { center, width, momentum } => {
                if !(width > 0.0 && width.is_finite() && center.is_finite() && momentum.is_finite()) {
                    return Err(Error::InvalidParameter("gaussian needs a finite centre, momentum and positive width".into()));
                }
            }
            Self::Indicator { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::InvalidParameter(format!("indicator needs lo < hi, got [{lo}, {hi}]")));
                }
            }
            Self::Samples(ref v) => {
                if v.iter().any(|z| !z.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite sample in datum".into()));
                }
            }
        }
        Ok(())
    }

    /// Pointwise value; `None` for sampled data.
    pub fn value_at(&self, x: f64) -> Option<Complex64> {
        match *self {
            Self::Gaussian { center, width, momentum } => {
                let r = (x - center) / width;
                Some(Complex64::from_polar((-r * r).exp(), momentum * x))
            }
            Self::Indicator { lo, hi } => Some(Complex64::new(if x >= lo && x <= hi { 1.0 } else { 0.0 }, 0.0)),
            Self::Samples(_) => None,
        }
    }

    /// Discontinuities the grid should place panel breaks at.
    pub fn edges(&self) -> Vec<f64> {
        match *self {
            Self::Indicator { lo, hi } => vec![lo, hi],
            _ => Vec::new(),
        }
    }

    /// `‖φ‖_{L²(|x| > L)} / ‖φ‖₂`.
    pub fn tail_fraction(&self, length: f64) -> f64 {
        match *self {
            Self::Gaussian { center, width, .. } => {
                let s = 2f64.sqrt() / width;
                let tail = 0.5 * (libm::erfc(s * (length - center)) + libm::erfc(s * (length + center)));
                tail.sqrt()
            }
            Self::Indicator { lo, hi } => {
                let outside = (hi.min(-length) - lo).max(0.0) + (hi - lo.max(length)).max(0.0);
                (outside / (hi - lo)).sqrt()
            }
            Self::Samples(_) => 0.0,
        }
    }

    pub fn sample(&self, grid: &Arc<SpatialGrid>) -> Result<SampledFunction> {
        self.validate()?;
        match self {
            Self::Samples(v) => SampledFunction::new(Arc::clone(grid), v.clone(), 0.0),
            _ => Ok(grid.sample(|x| self.value_at(x).expect("pointwise datum"), 0.0)),
        }
    }
}

/// Grid whose panels resolve every contour node that matters at time `t`:
/// the outer panel width is capped by [`max_panel_width`].
pub fn grid_for_time(t: f64, length: f64, datum: &InitialDatum) -> Result<Arc<SpatialGrid>> {
    let width = max_panel_width(t, &Contour::talbot(MAX_NODES))?.min(crate::grid::DEFAULT_PANEL_WIDTH);
    let grid = SpatialGrid::builder()
        .length(length)
        .panel_width(width)
        .break_at(&datum.edges())
        .build()?;
    Ok(Arc::new(grid))
}

fn significant_decay(t: f64, contour: &Contour) -> Result<f64> {
    let rule = contour.rule(t)?;
    let wmax = rule.iter().map(|n| n.weight.norm()).fold(0.0, f64::max);
    let mut lambda: f64 = 0.0;
    for n in &rule {
        if n.weight.norm() >= SIGNIFICANT_WEIGHT * wmax {
            lambda = lambda.max(SpectralPoint::new(n.z)?.sqrt_z().im);
        }
    }
    Ok(lambda)
}

/// Widest panel for which the decay `e^{−Im√z·x}` of the significant nodes of
/// `contour` at time `t` is still resolved.
pub fn max_panel_width(t: f64, contour: &Contour) -> Result<f64> {
    Ok(MAX_PANEL_DECAY / significant_decay(t, contour)?)
}

/// `(A − z)^{-1} φ` on the grid, with `φ` given by its two half-line restrictions.
struct NodeSolve<'a> {
    grid: &'a SpatialGrid,
    plus: &'a [Complex64],
    minus: &'a [Complex64],
}

impl NodeSolve<'_> {
    fn solve(&self, a: Alpha, s: &SpectralPoint, coupling: Complex64) -> Result<Vec<Complex64>> {
        let grid = self.grid;
        let nodes = grid.half_nodes();
        let weights = grid.half_weights();
        let order = grid.rule().order();
        let cum = &grid.rule().cumulative;
        let lambda = s.sqrt_z().im;

        let pairs: Vec<HalfLinePair> = nodes.iter().map(|&x| half_line_pair(a, s, x)).collect::<Result<_>>()?;
        let panels = grid.breaks().len() - 1;

        let sweep = |phi: &[Complex64]| -> (Vec<Complex64>, Vec<Complex64>) {
            // forward: A(x) = ∫_0^x q φ e^{−λ(x−y)}
            let mut fwd = vec![ZERO; nodes.len()];
            let mut carry = ZERO;
            for k in 0..panels {
                let (a0, b0) = (grid.breaks()[k], grid.breaks()[k + 1]);
                let half = 0.5 * (b0 - a0);
                let base = k * order;
                for m in 0..order {
                    let x = nodes[base + m];
                    let mut acc = carry * (-lambda * (x - a0)).exp();
                    for n in 0..order {
                        let y = nodes[base + n];
                        acc += half * cum[m][n] * pairs[base + n].q * phi[base + n] * decay(lambda, x - y);
                    }
                    fwd[base + m] = acc;
                }
                let mut end = carry * (-lambda * (b0 - a0)).exp();
                for n in 0..order {
                    let y = nodes[base + n];
                    end += weights[base + n] * pairs[base + n].q * phi[base + n] * decay(lambda, b0 - y);
                }
                carry = end;
            }
            // backward: B(x) = ∫_x^L p φ e^{−λ(y−x)}
            let mut bwd = vec![ZERO; nodes.len()];
            let mut carry = ZERO;
            for k in (0..panels).rev() {
                let (a0, b0) = (grid.breaks()[k], grid.breaks()[k + 1]);
                let half = 0.5 * (b0 - a0);
                let base = k * order;
                for m in 0..order {
                    let x = nodes[base + m];
                    let mut acc = carry * (-lambda * (b0 - x)).exp();
                    for n in 0..order {
                        let y = nodes[base + n];
                        let w = weights[base + n] - half * cum[m][n];
                        acc += w * pairs[base + n].p * phi[base + n] * decay(lambda, y - x);
                    }
                    bwd[base + m] = acc;
                }
                let mut start = carry * (-lambda * (b0 - a0)).exp();
                for n in 0..order {
                    let y = nodes[base + n];
                    start += weights[base + n] * pairs[base + n].p * phi[base + n] * decay(lambda, y - a0);
                }
                carry = start;
            }
            // carry is now ∫_0^L p φ e^{−λy} = S
            bwd.push(carry);
            (fwd, bwd)
        };

        let (fwd_p, mut bwd_p) = sweep(self.plus);
        let (fwd_m, mut bwd_m) = sweep(self.minus);
        let total = bwd_p.pop().unwrap_or(ZERO) + bwd_m.pop().unwrap_or(ZERO);

        let n = nodes.len();
        let mut out = vec![ZERO; 2 * n];
        for j in 0..n {
            let pair = pairs[j];
            let x = nodes[j];
            let rank_one = coupling * pair.p * (-lambda * x).exp() * total;
            let gp = 0.25 * PI * I * (pair.p * fwd_p[j] + pair.q * bwd_p[j]) + rank_one;
            let gm = 0.25 * PI * I * (pair.p * fwd_m[j] + pair.q * bwd_m[j]) + rank_one;
            out[n + j] = gp;
            out[n - 1 - j] = gm;
        }
        Ok(out)
    }
}

/// `e^{−λd}` with the exponent clamped: for `d < 0` the factor only appears
/// inside a panel, where it is bounded by [`MAX_PANEL_DECAY`].
fn decay(lambda: f64, d: f64) -> f64 {
    (-lambda * d).max(-700.0).min(50.0).exp()
}

/// Output of [`Propagator::evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub solution: SampledFunction,
    /// Contour nodes of the accepted rule.
    pub nodes: usize,
    /// `‖u_{2N} − u_N‖₂ / ‖u_{2N}‖₂` at acceptance.
    pub doubling_change: f64,
}

/// Heat propagator of the bridging operator for one `α`.
#[derive(Debug, Clone)]
pub struct Propagator {
    a: Alpha,
    kappa: Complex64,
    contour: Contour,
    tol: f64,
    max_nodes: usize,
}

impl Propagator {
    /// Calibrated coupling, Talbot contour with the default node count.
    pub fn new(a: Alpha) -> Result<Self> {
        Self::with_mode(a, CouplingMode::Calibrated)
    }

    pub fn with_mode(a: Alpha, mode: CouplingMode) -> Result<Self> {
        Ok(Self {
            a,
            kappa: mode.kappa(a)?,
            contour: Contour::talbot(DEFAULT_NODES),
            tol: 1e-8,
            max_nodes: MAX_NODES,
        })
    }

    pub fn with_contour(mut self, contour: Contour) -> Self {
        self.contour = contour;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn alpha(&self) -> Alpha {
        self.a
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    fn sum_over(&self, rule_contour: &Contour, t: f64, solve: &NodeSolve<'_>, len: usize) -> Result<Vec<Complex64>> {
        let coupling = self.kappa * coupling_shape(self.a);
        let rule = rule_contour.rule(t)?;
        let parts: Vec<Vec<Complex64>> = rule
            .par_iter()
            .map(|node| {
                let s = SpectralPoint::new(node.z)?;
                let g = solve.solve(self.a, &s, coupling)?;
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::ContourViolation(format!("non-finite resolvent at z = {}", node.z)));
                }
                Ok(g.into_iter().map(|v| node.weight * v).collect())
            })
            .collect::<Result<_>>()?;
        let mut out = vec![ZERO; len];
        for part in parts {
            for (o, v) in out.iter_mut().zip(part) {
                *o += v;
            }
        }
        Ok(out)
    }

    pub fn evolve(&self, t: f64, datum: &InitialDatum, grid: &Arc<SpatialGrid>) -> Result<Evolution> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        if self.contour.kind() == ContourKind::Vertical {
            return Err(Error::ContourViolation(
                "the vertical line does not converge for whole solutions; use it for pointwise kernels".into(),
            ));
        }
        let tail = datum.tail_fraction(grid.length());
        if tail > TAIL_BUDGET {
            return Err(Error::Truncation(format!(
                "datum has relative L² tail {tail:e} outside [−{L}, {L}]",
                L = grid.length()
            )));
        }
        let lambda = significant_decay(t, &self.contour.with_nodes(self.max_nodes))?;
        let widest = grid.breaks().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if lambda * widest > MAX_PANEL_DECAY {
            return Err(Error::GridTooCoarse(format!(
                "panels of width {widest} cannot resolve decay rate {lambda:.3} at t = {t}; use width ≤ {:.4}",
                MAX_PANEL_DECAY / lambda
            )));
        }

        let phi = datum.sample(grid)?;
        let solve = NodeSolve {
            grid,
            plus: &phi.side(true),
            minus: &phi.side(false),
        };
        let norm = |v: &[Complex64]| -> f64 {
            v.iter()
                .enumerate()
                .map(|(i, z)| z.norm_sqr() * grid.weight(i))
                .sum::<f64>()
                .sqrt()
        };

        let mut n = self.contour.nodes();
        let mut coarse = self.sum_over(&self.contour, t, &solve, grid.len())?;
        loop {
            if 2 * n > self.max_nodes {
                return Err(Error::NonConvergence(format!(
                    "solution did not settle up to {} contour nodes",
                    self.max_nodes
                )));
            }
            let fine = self.sum_over(&self.contour.with_nodes(2 * n), t, &solve, grid.len())?;
            let diff: Vec<Complex64> = fine.iter().zip(&coarse).map(|(a, b)| a - b).collect();
            let (d, f) = (norm(&diff), norm(&fine));
            if d <= self.tol * f || d == 0.0 {
                let solution = SampledFunction::new(Arc::clone(grid), fine, t)?;
                return Ok(Evolution {
                    solution,
                    nodes: 2 * n,
                    doubling_change: if f > 0.0 { d / f } else { 0.0 },
                });
            }
            n *= 2;
            coarse = fine;
        }
    }
}

/// `u(t) = e^{−tA} φ` with the calibrated coupling.
pub fn evolve(a: Alpha, t: f64, datum: &InitialDatum, grid: &Arc<SpatialGrid>, contour: &Contour) -> Result<SampledFunction> {
    Ok(Propagator::new(a)?
        .with_contour(contour.clone())
        .evolve(t, datum, grid)?
        .solution)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTraces {
    pub u0_minus: Complex64,
    pub u0_plus: Complex64,
    pub u1_minus: Complex64,
    pub u1_plus: Complex64,
    /// Largest extrapolation spread over the four limits.
    pub spread: f64,
}

impl BoundaryTraces {
    /// `(|u0⁻ − u0⁺|, |u1⁻ + u1⁺|)`.
    pub fn bridging_residuals(&self) -> (f64, f64) {
        ((self.u0_minus - self.u0_plus).norm(), (self.u1_minus + self.u1_plus).norm())
    }
}

/// Nodes used for trace extrapolation: `10⁻¹⁰ ≤ |x| ≤ 10⁻³`.
pub const TRACE_WINDOW: (f64, f64) = (1e-10, 1e-3);

pub fn boundary_traces(u: &SampledFunction, a: Alpha) -> Result<BoundaryTraces> {
    let grid = u.grid();
    let (xs, idx): (Vec<f64>, Vec<usize>) = grid
        .half_nodes()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x >= TRACE_WINDOW.0 && x <= TRACE_WINDOW.1)
        .map(|(j, &x)| (x, j))
        .unzip();
    if xs.len() < 8 {
        return Err(Error::TraceExtrapolation(format!(
            "only {} grid points in the trace window; refine the grid towards 0",
            xs.len()
        )));
    }
    let side = |positive: bool| {
        let vals: Vec<Complex64> = idx.iter().map(|&j| u.values()[grid.index_of(j, positive)]).collect();
        fit_traces(&xs, &vals, a.value())
    };
    let plus = side(true)?;
    let minus = side(false)?;
    Ok(BoundaryTraces {
        u0_minus: minus.g0,
        u0_plus: plus.g0,
        u1_minus: minus.g1,
        u1_plus: plus.g1,
        spread: plus.spread.max(minus.spread),
    })
}

/// Free heat flow on the whole line, sampled on `grid`.
pub fn classical_heat_evolve(t: f64, datum: &InitialDatum, grid: &Arc<SpatialGrid>) -> Result<SampledFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    datum.validate()?;
    let values = match *datum {
        InitialDatum::Gaussian { center, width, momentum } => {
            let a = 1.0 / (width * width);
            let spread = 1.0 + 4.0 * a * t;
            grid.points()
                .iter()
                .map(|&x| {
                    let d = x - center;
                    let expo = Complex64::new(-a * d * d - momentum * momentum * t, momentum * d) / spread;
                    expo.exp() * Complex64::from_polar(1.0, momentum * center) / spread.sqrt()
                })
                .collect()
        }
        InitialDatum::Indicator { lo, hi } => {
            let s = (4.0 * t).sqrt();
            grid.points()
                .iter()
                .map(|&x| Complex64::new(0.5 * (libm::erf((x - lo) / s) - libm::erf((x - hi) / s)), 0.0))
                .collect()
        }
        InitialDatum::Samples(ref v) => {
            if v.len() != grid.len() {
                return Err(Error::InvalidParameter("sampled datum does not match the grid".into()));
            }
            let pts = grid.points();
            let wts = grid.weights();
            pts.par_iter()
                .map(|&x| {
                    pts.iter()
                        .zip(&wts)
                        .zip(v)
                        .map(|((&y, &w), &f)| f * w * crate::heat_kernel::gaussian_kernel(t, x - y))
                        .sum()
                })
                .collect()
        }
    };
    SampledFunction::new(Arc::clone(grid), values, t)
}

/// Grid-weighted `L^p` norm; `p = ∞` is the largest modulus.
pub fn lp_norm(u: &SampledFunction, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(u.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    let grid = u.grid();
    let s: f64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm().powf(p) * grid.weight(i))
        .sum();
    Ok(s.powf(1.0 / p))
}
