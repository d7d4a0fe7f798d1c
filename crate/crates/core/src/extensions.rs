//! Self-adjoint extension families of `−d²/dx² + C_α/x²` on `ℝ \ {0}`, in
//! terms of the traces `u₀±`, `u₁±`.
//!
//! The two-dimensional boundary values `f₀± = lim f`, `f₁± = ±(1+α)^{-1}
//! lim |x|^{-α} ∂ₓf` of `f = |x|^{α/2} u` coincide with the one-dimensional
//! traces: `f₀± = u₀±` and `f₁± = u₁±` (the `±` prefactor absorbs the
//! direction of `∂ₓ`), so conditions are written in the traces directly.

use num_complex::Complex64;

use crate::evolve::BoundaryTraces;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtensionSpec {
    Friedrichs,
    /// Decoupled, Robin-type on the right: `u₀⁻ = 0`, `u₁⁺ = γ u₀⁺`.
    IR { gamma: f64 },
    /// Decoupled, Robin-type on the left: `u₁⁻ = γ u₀⁻`, `u₀⁺ = 0`.
    IL { gamma: f64 },
    /// `u₀⁺ = a u₀⁻`, `u₁⁻ + ā u₁⁺ = γ u₀⁻`.
    IIa { a: Complex64, gamma: f64 },
    /// `(u₁⁻, u₁⁺) = Γ̃ (u₀⁻, u₀⁺)` with `Γ̃` Hermitian.
    III(GammaMatrix),
}

/// `[[g1, g2 + i g3], [g2 − i g3, g4]]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMatrix {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl GammaMatrix {
    pub fn new(g1: f64, g2: f64, g3: f64, g4: f64) -> Self {
        Self { g1, g2, g3, g4 }
    }

    pub fn off_diagonal(&self) -> Complex64 {
        Complex64::new(self.g2, self.g3)
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.g1 + self.g4);
        let r = (0.25 * (self.g1 - self.g4).powi(2) + self.g2 * self.g2 + self.g3 * self.g3).sqrt();
        (mean - r, mean + r)
    }

    pub fn is_zero(&self) -> bool {
        self.g1 == 0.0 && self.g2 == 0.0 && self.g3 == 0.0 && self.g4 == 0.0
    }
}

impl ExtensionSpec {
    pub fn is_finite(&self) -> bool {
        match *self {
            Self::Friedrichs => true,
            Self::IR { gamma } | Self::IL { gamma } => gamma.is_finite(),
            Self::IIa { a, gamma } => a.is_finite() && gamma.is_finite(),
            Self::III(m) => [m.g1, m.g2, m.g3, m.g4].iter().all(|g| g.is_finite()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Friedrichs => "Friedrichs",
            Self::IR { .. } => "I_R",
            Self::IL { .. } => "I_L",
            Self::IIa { .. } => "II_a",
            Self::III(_) => "III",
        }
    }
}

/// The bridging extension, `II_a` with `a = 1`, `γ = 0`.
pub fn bridging_spec() -> ExtensionSpec {
    ExtensionSpec::IIa {
        a: Complex64::new(1.0, 0.0),
        gamma: 0.0,
    }
}

/// Absolute residual of each boundary condition of `spec` on `traces`.
pub fn bc_residual(spec: &ExtensionSpec, tr: &BoundaryTraces) -> Vec<f64> {
    let (u0m, u0p, u1m, u1p) = (tr.u0_minus, tr.u0_plus, tr.u1_minus, tr.u1_plus);
    match *spec {
        ExtensionSpec::Friedrichs => vec![u0m.norm(), u0p.norm()],
        ExtensionSpec::IR { gamma } => vec![u0m.norm(), (u1p - gamma * u0p).norm()],
        ExtensionSpec::IL { gamma } => vec![(u1m - gamma * u0m).norm(), u0p.norm()],
        ExtensionSpec::IIa { a, gamma } => vec![
            (u0p - a * u0m).norm(),
            (u1m + a.conj() * u1p - gamma * u0m).norm(),
        ],
        ExtensionSpec::III(m) => vec![
            (u1m - m.g1 * u0m - m.off_diagonal() * u0p).norm(),
            (u1p - m.off_diagonal().conj() * u0m - m.g4 * u0p).norm(),
        ],
    }
}

/// Non-negativity of the extension as an operator.
///
/// For family III the criterion is `γ₁ + γ₄ > 0` and `γ₁γ₄ ≥ γ₂² + γ₃²`,
/// which rejects `Γ̃ = 0` although that matrix is non-negative; see
/// [`zero_gamma_flag`].
pub fn is_nonnegative(spec: &ExtensionSpec) -> bool {
    match *spec {
        ExtensionSpec::Friedrichs => true,
        ExtensionSpec::IR { gamma } | ExtensionSpec::IL { gamma } | ExtensionSpec::IIa { gamma, .. } => gamma >= 0.0,
        ExtensionSpec::III(m) => m.g1 + m.g4 > 0.0 && m.g1 * m.g4 >= m.g2 * m.g2 + m.g3 * m.g3,
    }
}

/// `true` for family III with `Γ̃ = 0`, where the strict trace condition and
/// matrix non-negativity disagree.
pub fn zero_gamma_flag(spec: &ExtensionSpec) -> bool {
    matches!(spec, ExtensionSpec::III(m) if m.is_zero())
}
