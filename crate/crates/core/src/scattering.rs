//! Transmission and reflection across the singularity for the type-II
//! protocols (`f₀⁺ = a f₀⁻`, `f₁⁻ + ā f₁⁺ = γ f₀⁻`).
//!
//! With `ε = E^{(1+α)/2} Γ((1−α)/2)` and `c = 2^{1+α} e^{iπα/2} Γ((3+α)/2)`:
//!
//! ```text
//! T = |ε (1 + e^{iπα}) ā / D|²,   R = |(ε (1 − |a|² e^{iπα}) + iγc) / D|²,
//! D = ε (1 + |a|²) + iγc.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::gamma_real;
use crate::Alpha;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance on `|a| = 1` for the reflectionless energy.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionParamsIIa {
    pub a: Complex64,
    pub gamma: f64,
}

impl ExtensionParamsIIa {
    pub fn new(a: Complex64, gamma: f64) -> Result<Self> {
        if !a.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParameter("extension parameters must be finite".into()));
        }
        Ok(Self { a, gamma })
    }

    pub fn bridging() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Energy(f64);

impl Energy {
    pub fn new(e: f64) -> Result<Self> {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::Domain(format!("energy must be positive, got {e}")));
        }
        Ok(Self(e))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `Γ((1−α)/2)` and `2^{1+α} Γ((3+α)/2)`.
fn constants(a: Alpha) -> (f64, f64) {
    let al = a.value();
    let lo = gamma_real(0.5 * (1.0 - al)).expect("(1−α)/2 > 0");
    let hi = gamma_real(0.5 * (3.0 + al)).expect("(3+α)/2 > 0");
    (lo, 2f64.powf(1.0 + al) * hi)
}

/// Numerators of the transmitted and reflected amplitudes and the common
/// denominator.
fn amplitudes(a: Alpha, p: ExtensionParamsIIa, e: Energy) -> (Complex64, Complex64, Complex64) {
    let al = a.value();
    let (g_lo, c_hi) = constants(a);
    let eps = e.value().powf(0.5 * (1.0 + al)) * g_lo;
    let phase = Complex64::from_polar(1.0, PI * al);
    let coupling = I * p.gamma * c_hi * Complex64::from_polar(1.0, 0.5 * PI * al);
    let m2 = p.a.norm_sqr();
    let den = eps * (1.0 + m2) + coupling;
    let t = eps * (1.0 + phase) * p.a.conj();
    let r = eps * (1.0 - m2 * phase) + coupling;
    (t, r, den)
}

/// `(T, R)`: the smaller one is evaluated directly, the larger as its
/// complement, so both stay in `[0, 1]` and keep full relative accuracy.
fn coefficients(a: Alpha, p: ExtensionParamsIIa, e: Energy) -> (f64, f64) {
    let (t, r, d) = amplitudes(a, p, e);
    let (t, r) = ((t / d).norm_sqr(), (r / d).norm_sqr());
    if t <= r {
        (t, 1.0 - t)
    } else {
        (1.0 - r, r)
    }
}

pub fn transmission(a: Alpha, p: ExtensionParamsIIa, e: Energy) -> f64 {
    coefficients(a, p, e).0
}

pub fn reflection(a: Alpha, p: ExtensionParamsIIa, e: Energy) -> f64 {
    coefficients(a, p, e).1
}

/// The energy at which nothing is reflected; exists only for `α ∈ (0, 1)`,
/// `|a| = 1` and `γ > 0`.
pub fn reflectionless_energy(a: Alpha, p: ExtensionParamsIIa) -> Option<Energy> {
    let al = a.value();
    if !(al > 0.0) || (p.a.norm() - 1.0).abs() > UNIT_MODULUS_TOL || !(p.gamma > 0.0) {
        return None;
    }
    let (g_lo, c_hi) = constants(a);
    let h = 0.5 * PI * al;
    let base = c_hi * p.gamma * h.sin() / (g_lo * (1.0 - (PI * al).cos()));
    Energy::new(base.powf(2.0 / (1.0 + al))).ok()
}

/// `(T, R)` as `E → ∞`; independent of `γ`.
pub fn high_energy_limits(a: Alpha, p: ExtensionParamsIIa) -> (f64, f64) {
    let c = (PI * a.value()).cos();
    let m2 = p.a.norm_sqr();
    let den = (1.0 + m2).powi(2);
    (2.0 * m2 * (1.0 + c) / den, (1.0 + m2 * m2 - 2.0 * m2 * c) / den)
}

/// `(T, R)` as `E → 0`, which is `(0, 1)` whenever `γ ≠ 0`.
pub fn low_energy_limits(_a: Alpha, p: ExtensionParamsIIa) -> Result<(f64, f64)> {
    if p.gamma == 0.0 {
        return Err(Error::Precondition(
            "for γ = 0 the coefficients do not depend on the energy".into(),
        ));
    }
    Ok((0.0, 1.0))
}

/// `((1 + cos πα)/2, (1 − cos πα)/2)`, the energy-independent split of the
/// bridging protocol.
pub fn bridging_coefficients(a: Alpha) -> (f64, f64) {
    let c = (PI * a.value()).cos();
    (0.5 * (1.0 + c), 0.5 * (1.0 - c))
}
