//! Bromwich-type contours and the quadrature of
//! `f(t) = (1/2πi) ∫_Γ e^{−zt} F(z) dz`, with `F` analytic off `[0, ∞)`.
//!
//! With `s = −z` this is the classical Bromwich integral of `F(−s)`, whose
//! singularities lie on `(−∞, 0]`; the Talbot and hyperbolic contours wrap
//! that half-line, the vertical line `Re z = σ < 0` is the textbook choice.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

// Weideman's optimised Talbot shape
const TALBOT_SHIFT: f64 = -0.6122;
const TALBOT_A: f64 = 0.5017;
const TALBOT_B: f64 = 0.6407;
const TALBOT_C: f64 = 0.2645;
const HYPERBOLIC_BETA: f64 = 1.1721;

pub const DEFAULT_NODES: usize = 64;
pub const MAX_NODES: usize = 1024;
/// `μ t` for the Talbot and hyperbolic contours: the truncation error is
/// about `e^{−1.36 μt}` and round-off is amplified by about `e^{0.17 μt}`.
pub const DEFAULT_SCALE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContourKind {
    Vertical,
    Talbot,
    Hyperbolic,
}

/// Quadrature node: the integral is approximated by `Σ weight · F(z)`, the
/// weight already containing `e^{−zt}`, `dz` and `1/(2πi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourNode {
    pub z: Complex64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    kind: ContourKind,
    params: Vec<f64>,
    nodes: usize,
}

impl Contour {
    /// Talbot contour `s(θ) = (μ)(−0.6122 + 0.5017 θ cot(0.6407 θ) + 0.2645 iθ)`,
    /// `μ = scale / t`.
    pub fn talbot(nodes: usize) -> Self {
        Self::talbot_scaled(nodes, DEFAULT_SCALE)
    }

    pub fn talbot_scaled(nodes: usize, scale: f64) -> Self {
        Self {
            kind: ContourKind::Talbot,
            params: vec![scale],
            nodes,
        }
    }

    /// Hyperbola `s(u) = μ(1 + sin(iu − β))`, `μ = scale / t`.
    pub fn hyperbolic(nodes: usize) -> Self {
        Self {
            kind: ContourKind::Hyperbolic,
            params: vec![DEFAULT_SCALE],
            nodes,
        }
    }

    /// Vertical line `Re z = abscissa < 0`, truncated to `|Im z| <= half_width`.
    pub fn vertical(abscissa: f64, half_width: f64, nodes: usize) -> Self {
        Self {
            kind: ContourKind::Vertical,
            params: vec![abscissa, half_width],
            nodes,
        }
    }

    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn with_nodes(&self, nodes: usize) -> Self {
        Self {
            nodes,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidParameter("a contour needs at least two nodes".into()));
        }
        match self.kind {
            ContourKind::Vertical => {
                let (sigma, width) = (self.params[0], self.params[1]);
                if !(sigma < 0.0) {
                    return Err(Error::ContourViolation(format!(
                        "vertical abscissa must be negative, got {sigma}"
                    )));
                }
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidParameter("vertical half-width must be positive".into()));
                }
            }
            ContourKind::Talbot | ContourKind::Hyperbolic => {
                if !(self.params[0] > 0.0 && self.params[0].is_finite()) {
                    return Err(Error::InvalidParameter("contour scale must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Nodes and weights for time `t`.
    pub fn rule(&self, t: f64) -> Result<Vec<ContourNode>> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        self.validate()?;
        let n = self.nodes;
        let nf = n as f64;
        let nodes = match self.kind {
            ContourKind::Talbot => {
                let mu = self.params[0] / t;
                (0..n)
                    .map(|k| {
                        let th = -PI + (k as f64 + 0.5) * 2.0 * PI / nf;
                        let b = TALBOT_B * th;
                        let cot = b.cos() / b.sin();
                        let s = mu * Complex64::new(TALBOT_SHIFT + TALBOT_A * th * cot, TALBOT_C * th);
                        let ds = mu
                            * Complex64::new(TALBOT_A * (cot - b / b.sin().powi(2)), TALBOT_C);
                        ContourNode {
                            z: -s,
                            weight: (s * t).exp() * ds / (I * nf),
                        }
                    })
                    .collect()
            }
            ContourKind::Hyperbolic => {
                let scale = self.params[0];
                let mu = scale / t;
                let half = ((1.0 + 36.0 / scale) / HYPERBOLIC_BETA.sin()).acosh();
                let h = 2.0 * half / nf;
                (0..n)
                    .map(|k| {
                        let u = -half + (k as f64 + 0.5) * h;
                        let arg = Complex64::new(-HYPERBOLIC_BETA, u);
                        let s = mu * (1.0 + arg.sin());
                        let ds = mu * I * arg.cos();
                        ContourNode {
                            z: -s,
                            weight: (s * t).exp() * ds * h / (2.0 * PI * I),
                        }
                    })
                    .collect()
            }
            ContourKind::Vertical => {
                let (sigma, width) = (self.params[0], self.params[1]);
                let h = 2.0 * width / nf;
                (0..n)
                    .map(|k| {
                        let omega = -width + (k as f64 + 0.5) * h;
                        // upward in z: z = σ + iω
                        let z = Complex64::new(sigma, omega);
                        ContourNode {
                            z,
                            weight: (-z * t).exp() * I * h / (2.0 * PI * I),
                        }
                    })
                    .collect()
            }
        };
        Ok(nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseLaplaceOptions {
    /// Relative agreement required between `N` and `2N` nodes.
    pub tol: f64,
    /// Absolute floor below which differences are accepted regardless.
    pub abs_floor: f64,
    pub max_nodes: usize,
}

impl Default for InverseLaplaceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            abs_floor: 1e-14,
            max_nodes: MAX_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseLaplace {
    pub value: Complex64,
    /// Node count of the accepted (finer) rule.
    pub nodes: usize,
    /// `|f_{2N} − f_N|` at acceptance.
    pub doubling_change: f64,
}

fn quadrature_sum<F>(f: &F, contour: &Contour, t: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut sum = Complex64::new(0.0, 0.0);
    for node in contour.rule(t)? {
        let v = f(node.z)?;
        if !v.is_finite() {
            return Err(Error::ContourViolation(format!("transform is {v} at z = {}", node.z)));
        }
        sum += node.weight * v;
    }
    Ok(sum)
}

/// Evaluates `(1/2πi) ∫_Γ e^{−zt} F(z) dz`, doubling the node count until two
/// successive rules agree.
pub fn inverse_laplace<F>(f: F, t: f64, contour: &Contour, opts: InverseLaplaceOptions) -> Result<InverseLaplace>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut n = contour.nodes();
    let mut coarse = quadrature_sum(&f, contour, t)?;
    loop {
        if 2 * n > opts.max_nodes {
            return Err(Error::NonConvergence(format!(
                "no agreement up to {} nodes at t = {t}",
                opts.max_nodes
            )));
        }
        let fine = quadrature_sum(&f, &contour.with_nodes(2 * n), t)?;
        let change = (fine - coarse).norm();
        if change <= opts.tol * fine.norm() || change <= opts.abs_floor {
            return Ok(InverseLaplace {
                value: fine,
                nodes: 2 * n,
                doubling_change: change,
            });
        }
        n *= 2;
        coarse = fine;
    }
}
