//! Integral kernel of the resolvent `(A − z)^{-1}` of the bridging operator.
//!
//! On each half-line the kernel is built from the outgoing solution
//! `P(x) = √x H⁽¹⁾_ν(x√z)` and the regular one `Q(x) = 2√x J_ν(x√z)`:
//!
//! ```text
//! R(x, y) = δ_{same side} G(|x|, |y|) + κ cos(πα/2) e^{iπα/2} P(|x|) P(|y|),
//! G(x, y) = (iπ/4) P(max) Q(min).
//! ```
//!
//! The coupling constant `κ` is fixed numerically by demanding that
//! `R(z) f` satisfies the bridging conditions; the historical printed value
//! `−iπ/8` is available as [`CouplingMode::Verbatim`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, PanelRule};
use crate::special::{bessel_scaled, ComplexArg};
use crate::traces::{fit_traces, geometric_points};
use crate::Alpha;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The printed rank-one constant.
pub const KAPPA_VERBATIM: Complex64 = Complex64 { re: 0.0, im: -PI / 8.0 };

/// Resolvent point `z ∉ [0, ∞)` with `√z` on the branch `Im √z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    z: Complex64,
    sqrt_z: Complex64,
}

impl SpectralPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("non-finite spectral point {z}")));
        }
        if z.im == 0.0 && z.re >= 0.0 {
            return Err(Error::Domain(format!("{z} lies on the spectrum [0, ∞)")));
        }
        // −z is off the negative axis, so i·√(−z) has positive imaginary part
        let sqrt_z = I * (-z).sqrt();
        if !(sqrt_z.im > 0.0) {
            return Err(Error::ContourViolation(format!("Im √z = {} at z = {z}", sqrt_z.im)));
        }
        Ok(Self { z, sqrt_z })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn sqrt_z(&self) -> Complex64 {
        self.sqrt_z
    }
}

/// Non-zero position on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedCoord(f64);

impl SignedCoord {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || x == 0.0 {
            return Err(Error::Domain(format!("coordinate must be finite and non-zero, got {x}")));
        }
        Ok(Self(x))
    }

    pub fn x(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    pub fn positive(self) -> bool {
        self.0 > 0.0
    }
}

/// `P` and `Q` at one point, with the exponential behaviour split off:
/// `P = p · e^{−Im√z·x}`, `Q = q · e^{Im√z·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLinePair {
    pub p: Complex64,
    pub q: Complex64,
}

pub fn half_line_pair(a: Alpha, s: &SpectralPoint, x: f64) -> Result<HalfLinePair> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("half-line coordinate must be positive, got {x}")));
    }
    let k = s.sqrt_z();
    let b = bessel_scaled(a.nu(), ComplexArg::new(k * x)?);
    let root = x.sqrt();
    Ok(HalfLinePair {
        p: root * b.h1 * Complex64::from_polar(1.0, k.re * x),
        q: 2.0 * root * b.j,
    })
}

/// Outgoing solution `√x (J_ν + i Y_ν)(x√z)`.
pub fn p_fn(a: Alpha, s: &SpectralPoint, x: f64) -> Result<Complex64> {
    let pair = half_line_pair(a, s, x)?;
    Ok(pair.p * (-s.sqrt_z().im * x).exp())
}

/// Regular solution `2√x J_ν(x√z)`.
pub fn q_fn(a: Alpha, s: &SpectralPoint, x: f64) -> Result<Complex64> {
    let pair = half_line_pair(a, s, x)?;
    Ok(pair.q * (s.sqrt_z().im * x).exp())
}

fn green_from_pairs(s: &SpectralPoint, x: f64, px: HalfLinePair, y: f64, py: HalfLinePair) -> Complex64 {
    let decay = (-s.sqrt_z().im * (x - y).abs()).exp();
    let prod = if x >= y { px.p * py.q } else { py.p * px.q };
    0.25 * PI * I * prod * decay
}

/// Half-line Green function of `−d² + C_α/x² − z`.
pub fn green_half(a: Alpha, s: &SpectralPoint, x: f64, y: f64) -> Result<Complex64> {
    let px = half_line_pair(a, s, x)?;
    let py = half_line_pair(a, s, y)?;
    Ok(green_from_pairs(s, x, px, y, py))
}

/// `cos(πα/2) e^{iπα/2}`.
pub fn coupling_shape(a: Alpha) -> Complex64 {
    let h = 0.5 * PI * a.value();
    h.cos() * Complex64::from_polar(1.0, h)
}

pub fn resolvent_kernel(
    a: Alpha,
    s: &SpectralPoint,
    x: SignedCoord,
    y: SignedCoord,
    kappa: Complex64,
) -> Result<Complex64> {
    if !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite coupling {kappa}")));
    }
    let px = half_line_pair(a, s, x.abs())?;
    let py = half_line_pair(a, s, y.abs())?;
    Ok(kernel_from_pairs(a, s, x, px, y, py, kappa))
}

pub(crate) fn kernel_from_pairs(
    a: Alpha,
    s: &SpectralPoint,
    x: SignedCoord,
    px: HalfLinePair,
    y: SignedCoord,
    py: HalfLinePair,
    kappa: Complex64,
) -> Complex64 {
    let im_k = s.sqrt_z().im;
    let rank_one = kappa * coupling_shape(a) * px.p * py.p * (-im_k * (x.abs() + y.abs())).exp();
    if x.positive() == y.positive() {
        green_from_pairs(s, x.abs(), px, y.abs(), py) + rank_one
    } else {
        rank_one
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CouplingMode {
    #[default]
    Calibrated,
    Verbatim,
}

impl CouplingMode {
    pub fn kappa(self, a: Alpha) -> Result<Complex64> {
        match self {
            CouplingMode::Calibrated => calibrate_coupling(a),
            CouplingMode::Verbatim => Ok(KAPPA_VERBATIM),
        }
    }
}

/// Spectral points used to check that the calibrated constant does not
/// depend on `z`.
pub const CALIBRATION_POINTS: [Complex64; 3] = [
    Complex64 { re: -1.0, im: 0.0 },
    Complex64 { re: -2.0, im: -1.0 },
    Complex64 { re: -0.5, im: 2.0 },
];

/// Test data for calibration: Gaussians well inside each half-line, so that
/// `∫₀^x Q f` and `∫₀^x P f` are negligible at the trace sampling points.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationDatum {
    pub right: (f64, f64, f64),
    pub left: (f64, f64, f64),
}

impl CalibrationDatum {
    pub const DEFAULT: Self = Self {
        right: (1.0, 1.5, 0.3),
        left: (0.6, 1.0, 0.25),
    };
    pub const ALTERNATE: Self = Self {
        right: (0.4, 2.0, 0.35),
        left: (1.3, 1.4, 0.3),
    };
}

/// Result of a single-`z` calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub kappa: Complex64,
    /// `|g₀⁻ − g₀⁺| / max(|g₀⁻|, 1)` at the calibrated constant.
    pub value_residual: f64,
    /// `|g₁⁻ + g₁⁺| / max(|g₁⁻|, 1)` at the calibrated constant.
    pub derivative_residual: f64,
}

fn weighted_integral(a: Alpha, s: &SpectralPoint, (amp, centre, width): (f64, f64, f64)) -> Result<Complex64> {
    let rule = PanelRule::new(16);
    let lo = (centre - 8.0 * width).max(1e-3);
    let hi = centre + 8.0 * width;
    let panels = 32;
    let half = 0.5 * (hi - lo) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = lo + (2 * k + 1) as f64 * half;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = mid + half * t;
            let f = amp * (-((y - centre) / width).powi(2)).exp();
            sum += half * w * f * p_fn(a, s, y)?;
        }
    }
    Ok(sum)
}

/// Determines `κ` at one spectral point from the trace conditions of
/// `g = R(z) f`, which is affine in `κ`.
pub fn calibrate_at(a: Alpha, s: &SpectralPoint, datum: CalibrationDatum) -> Result<Calibration> {
    let s_plus = weighted_integral(a, s, datum.right)?;
    let s_minus = weighted_integral(a, s, datum.left)?;
    let total = s_plus + s_minus;
    let shape = coupling_shape(a);

    let xs = geometric_points(1e-9, 1e-3, 0.75);
    let mut fixed_plus = Vec::with_capacity(xs.len());
    let mut fixed_minus = Vec::with_capacity(xs.len());
    let mut unit = Vec::with_capacity(xs.len());
    for &x in &xs {
        let p = p_fn(a, s, x)?;
        let q = q_fn(a, s, x)?;
        fixed_plus.push(0.25 * PI * I * q * s_plus);
        fixed_minus.push(0.25 * PI * I * q * s_minus);
        unit.push(shape * p * total);
    }
    let fp = fit_traces(&xs, &fixed_plus, a.value())?;
    let fm = fit_traces(&xs, &fixed_minus, a.value())?;
    let fu = fit_traces(&xs, &unit, a.value())?;

    // g₁⁺ + g₁⁻ = (fp.g1 + fm.g1) + 2κ fu.g1 must vanish
    if fu.g1.norm() == 0.0 {
        return Err(Error::Calibration("coupling term carries no first-order trace".into()));
    }
    let kappa = -(fp.g1 + fm.g1) / (2.0 * fu.g1);

    let g0p = fp.g0 + kappa * fu.g0;
    let g0m = fm.g0 + kappa * fu.g0;
    let g1p = fp.g1 + kappa * fu.g1;
    let g1m = fm.g1 + kappa * fu.g1;
    Ok(Calibration {
        kappa,
        value_residual: (g0m - g0p).norm() / g0m.norm().max(1.0),
        derivative_residual: (g1m + g1p).norm() / g1m.norm().max(1.0),
    })
}

fn cache() -> &'static Mutex<HashMap<u64, Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Complex64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Calibrated coupling constant for `α`, cached after the first call.
pub fn calibrate_coupling(a: Alpha) -> Result<Complex64> {
    let key = a.value().to_bits();
    if let Some(k) = cache().lock().expect("calibration cache poisoned").get(&key) {
        return Ok(*k);
    }
    let mut values = Vec::with_capacity(CALIBRATION_POINTS.len());
    for z in CALIBRATION_POINTS {
        let s = SpectralPoint::new(z)?;
        let c = calibrate_at(a, &s, CalibrationDatum::DEFAULT)?;
        if c.value_residual > 1e-8 || c.derivative_residual > 1e-8 {
            return Err(Error::Calibration(format!(
                "bridging residuals ({:e}, {:e}) at z = {z}",
                c.value_residual, c.derivative_residual
            )));
        }
        values.push(c.kappa);
    }
    let kappa = values[0];
    for (z, k) in CALIBRATION_POINTS.iter().zip(&values) {
        if (k - kappa).norm() > 1e-6 * kappa.norm() {
            return Err(Error::Calibration(format!(
                "coupling varies with z: {k} at {z} versus {kappa}"
            )));
        }
    }
    cache()
        .lock()
        .expect("calibration cache poisoned")
        .entry(key)
        .or_insert(kappa);
    Ok(kappa)
}

/// Outcome of the finite-difference resolvent check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub residual: f64,
    /// The datum vanished identically; the residual is reported as 0.
    pub empty_input: bool,
    /// Estimated finite-difference truncation exceeds the tolerance budget.
    pub grid_too_coarse: bool,
}

/// Applies `−d²/dx² + C_α/x² − z` by central differences with spacing `h`
/// to `g = R(z) f`, `f` supported in `[lo, hi]` (one side of the origin), and
/// returns `‖(A − z) g − f‖₂ / ‖f‖₂` over the support.
pub fn verify_resolvent_identity<F>(
    a: Alpha,
    s: &SpectralPoint,
    kappa: Complex64,
    f: F,
    support: (f64, f64),
    h: f64,
) -> Result<IdentityCheck>
where
    F: Fn(f64) -> Complex64,
{
    let (lo, hi) = support;
    if !(lo < hi) || lo * hi <= 0.0 {
        return Err(Error::Precondition(
            "support must be an interval on one side of the origin".into(),
        ));
    }
    if !(h > 0.0) || h > (hi - lo) / 8.0 {
        return Err(Error::Precondition(format!("spacing {h} too large for the support")));
    }
    let sign = lo.signum();
    let (a_abs, b_abs) = (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()));
    let n = ((b_abs - a_abs) / h).round() as usize;
    let h = (b_abs - a_abs) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| a_abs + h * i as f64).collect();
    let fv: Vec<Complex64> = xs.iter().map(|&x| f(sign * x)).collect();
    let f_norm = fv.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if f_norm == 0.0 {
        return Ok(IdentityCheck {
            residual: 0.0,
            empty_input: true,
            grid_too_coarse: false,
        });
    }

    // cell-wise four-point Gauss rules for the cumulative integrals
    let (gx, gw) = quadrature::gauss_legendre(4);
    let k_im = s.sqrt_z().im;
    let mut pq = Vec::with_capacity(xs.len());
    for &x in &xs {
        pq.push(half_line_pair(a, s, x)?);
    }
    // running ∫_{a}^{x_i} Q f and ∫_{x_i}^{b} P f, unscaled (moderate z only)
    let mut cum_q = vec![Complex64::new(0.0, 0.0); xs.len()];
    let mut cell_p = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mid = xs[i] + 0.5 * h;
        let mut iq = Complex64::new(0.0, 0.0);
        let mut ip = Complex64::new(0.0, 0.0);
        for (&t, &w) in gx.iter().zip(&gw) {
            let y = mid + 0.5 * h * t;
            let pair = half_line_pair(a, s, y)?;
            let fy = f(sign * y);
            iq += 0.5 * h * w * pair.q * (k_im * y).exp() * fy;
            ip += 0.5 * h * w * pair.p * (-k_im * y).exp() * fy;
        }
        cum_q[i + 1] = cum_q[i] + iq;
        cell_p[i] = ip;
    }
    let mut tail_p = vec![Complex64::new(0.0, 0.0); xs.len()];
    for i in (0..n).rev() {
        tail_p[i] = tail_p[i + 1] + cell_p[i];
    }
    let total_p = tail_p[0];
    let shape = kappa * coupling_shape(a);
    let g: Vec<Complex64> = xs
        .iter()
        .zip(&pq)
        .enumerate()
        .map(|(i, (&x, pair))| {
            let p = pair.p * (-k_im * x).exp();
            let q = pair.q * (k_im * x).exp();
            0.25 * PI * I * (p * cum_q[i] + q * tail_p[i]) + shape * p * total_p
        })
        .collect();

    let c = a.c_alpha();
    let z = s.z();
    let mut res2 = 0.0;
    let mut f2 = 0.0;
    let mut trunc2 = 0.0;
    for i in 1..n {
        let x = xs[i];
        let d2 = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h);
        let lhs = -d2 + c * g[i] / (x * x) - z * g[i];
        res2 += (lhs - fv[i]).norm_sqr();
        f2 += fv[i].norm_sqr();
        if (2..n - 1).contains(&i) {
            let d4 = (g[i + 2] - 4.0 * g[i + 1] + 6.0 * g[i] - 4.0 * g[i - 1] + g[i - 2]) / h.powi(4);
            trunc2 += (h * h / 12.0 * d4).norm_sqr();
        }
    }
    let residual = if f2 > 0.0 { (res2 / f2).sqrt() } else { 0.0 };
    Ok(IdentityCheck {
        residual,
        empty_input: false,
        grid_too_coarse: f2 > 0.0 && (trunc2 / f2).sqrt() > 1e-3,
    })
}
