//! Heat kernel `K(t; x, y) = (1/2πi) ∫_Γ e^{−zt} (A − z)^{-1}(x, y) dz`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{inverse_laplace, Contour, ContourKind, InverseLaplace, InverseLaplaceOptions};
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, SpatialGrid};
use crate::resolvent::{half_line_pair, kernel_from_pairs, resolvent_kernel, HalfLinePair, SignedCoord, SpectralPoint};
use crate::Alpha;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Abscissa of the validation line `Re z = −1`.
pub const VERTICAL_ABSCISSA: f64 = -1.0;
/// Node cap on the vertical line: the integrand only decays like
/// `e^{−|x−y|√(|ω|/2)}` there, so far more nodes are needed than on Talbot.
pub const VERTICAL_MAX_NODES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelRequest {
    pub a: Alpha,
    pub t: f64,
    pub x: SignedCoord,
    pub y: SignedCoord,
    pub contour: Contour,
    pub kappa: Complex64,
}

impl HeatKernelRequest {
    /// Talbot contour at the default node count.
    pub fn new(a: Alpha, t: f64, x: SignedCoord, y: SignedCoord, kappa: Complex64) -> Self {
        Self {
            a,
            t,
            x,
            y,
            contour: Contour::talbot(crate::contour::DEFAULT_NODES),
            kappa,
        }
    }

    pub fn with_contour(mut self, contour: Contour) -> Self {
        self.contour = contour;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatKernelValue {
    pub value: f64,
    pub imag_residue: f64,
    pub nodes: usize,
    pub doubling_change: f64,
}

/// Free-line Gaussian `(4πt)^{-1/2} e^{−d²/4t}`.
pub fn gaussian_kernel(t: f64, d: f64) -> f64 {
    (-d * d / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// Free resolvent `(i/2√z) e^{i√z d}`.
fn free_resolvent(s: &SpectralPoint, d: f64) -> Complex64 {
    let k = s.sqrt_z();
    I / (2.0 * k) * (I * k * d).exp()
}

/// Distance governing the decay of the kernel minus the free part on the
/// vertical line, `e^{−Im√z · d}`; for `α > 0` the half-line Green function
/// differs from the free one by `O(1/z)` terms still oscillating in `|x − y|`.
fn vertical_separation(x: SignedCoord, y: SignedCoord) -> f64 {
    if x.positive() == y.positive() {
        (x.x() - y.x()).abs()
    } else {
        x.abs() + y.abs()
    }
}

/// Vertical line for `(t, x, y)`; the free Gaussian is subtracted from the
/// integrand, so only the weaker of the two exponential decays matters.
pub fn vertical_contour(t: f64, x: SignedCoord, y: SignedCoord) -> Result<Contour> {
    let d = vertical_separation(x, y);
    if d < 1e-3 {
        return Err(Error::NonConvergence(format!(
            "vertical contour needs separated points, got separation {d:e}"
        )));
    }
    // Im√z ≈ √(|ω|/2) for |ω| ≫ 1: cut where e^{−d√(ω/2)} drops below 1e-14
    let width = 2.0 * (33.0 / d).powi(2) + 10.0;
    // the trapezoid rule aliases in K(t + 2π/h) e^{−|σ|·2π/h}; spacing
    // 2π/(t + d + 25) keeps that image below e^{−25}
    let period_nodes = width * (t + d + 25.0) / PI;
    let nodes = (period_nodes.max(64.0) as usize).next_power_of_two();
    Ok(Contour::vertical(VERTICAL_ABSCISSA, width, nodes))
}

fn inverse(req: &HeatKernelRequest, contour: &Contour, subtract_free: bool) -> Result<InverseLaplace> {
    let opts = InverseLaplaceOptions {
        max_nodes: if contour.kind() == ContourKind::Vertical {
            VERTICAL_MAX_NODES
        } else {
            crate::contour::MAX_NODES
        },
        ..Default::default()
    };
    let free_d = (req.x.x() - req.y.x()).abs();
    let f = |z: Complex64| {
        let s = SpectralPoint::new(z)?;
        let r = resolvent_kernel(req.a, &s, req.x, req.y, req.kappa)?;
        Ok(if subtract_free { r - free_resolvent(&s, free_d) } else { r })
    };
    inverse_laplace(f, req.t, contour, opts)
}

pub fn heat_kernel(req: &HeatKernelRequest) -> Result<HeatKernelValue> {
    if !(req.t > 0.0 && req.t.is_finite()) {
        return Err(Error::Domain(format!("time must be positive, got {}", req.t)));
    }
    let (value, inv) = match req.contour.kind() {
        ContourKind::Vertical => {
            let inv = inverse(req, &req.contour, true)?;
            let free = gaussian_kernel(req.t, req.x.x() - req.y.x());
            (inv.value + free, inv)
        }
        _ => {
            let inv = inverse(req, &req.contour, false)?;
            (inv.value, inv)
        }
    };
    let bound = 1e-8 * value.re.abs().max(req.t.powf(-0.5));
    if value.im.abs() > bound {
        return Err(Error::ImaginaryResidue {
            imag: value.im.abs(),
            bound,
        });
    }
    Ok(HeatKernelValue {
        value: value.re,
        imag_residue: value.im.abs(),
        nodes: inv.nodes,
        doubling_change: inv.doubling_change,
    })
}

/// `x ↦ K(t; x, y)` on every grid point, sharing the Bessel evaluations of
/// each contour node across the column.
pub fn kernel_column(
    a: Alpha,
    t: f64,
    y: SignedCoord,
    grid: &Arc<SpatialGrid>,
    kappa: Complex64,
    contour: &Contour,
) -> Result<SampledFunction> {
    if contour.kind() == ContourKind::Vertical {
        return Err(Error::ContourViolation("kernel columns need a contour wrapping the spectrum".into()));
    }
    let column = |c: &Contour| -> Result<Vec<Complex64>> {
        let parts: Vec<Vec<Complex64>> = c
            .rule(t)?
            .par_iter()
            .map(|node| {
                let s = SpectralPoint::new(node.z)?;
                let py = half_line_pair(a, &s, y.abs())?;
                let pairs: Vec<HalfLinePair> = grid
                    .half_nodes()
                    .iter()
                    .map(|&x| half_line_pair(a, &s, x))
                    .collect::<Result<_>>()?;
                (0..grid.len())
                    .map(|i| {
                        let x = grid.point(i);
                        let j = if x > 0.0 { i - grid.half_len() } else { grid.half_len() - 1 - i };
                        let k = kernel_from_pairs(a, &s, SignedCoord::new(x)?, pairs[j], y, py, kappa);
                        if !k.is_finite() {
                            return Err(Error::ContourViolation(format!("non-finite kernel at z = {}", node.z)));
                        }
                        Ok(node.weight * k)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        for part in parts {
            for (o, v) in out.iter_mut().zip(part) {
                *o += v;
            }
        }
        Ok(out)
    };
    let l2 = |v: &[Complex64]| -> f64 {
        v.iter().enumerate().map(|(i, z)| z.norm_sqr() * grid.weight(i)).sum::<f64>().sqrt()
    };
    let mut n = contour.nodes();
    let mut coarse = column(contour)?;
    loop {
        if 2 * n > crate::contour::MAX_NODES {
            return Err(Error::NonConvergence(format!("kernel column did not settle at t = {t}")));
        }
        let fine = column(&contour.with_nodes(2 * n))?;
        let diff: Vec<Complex64> = fine.iter().zip(&coarse).map(|(a, b)| a - b).collect();
        if l2(&diff) <= 1e-8 * l2(&fine) {
            return SampledFunction::new(Arc::clone(grid), fine, t);
        }
        n *= 2;
        coarse = fine;
    }
}
