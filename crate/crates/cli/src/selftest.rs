//! Quick health checks against closed forms; each prints one PASS/FAIL line.

use std::f64::consts::PI;

use bridging_heat::dispersive::{classical_decay_fit, log_times, target_exponent};
use bridging_heat::evolve::{boundary_traces, grid_for_time, InitialDatum, Propagator};
use bridging_heat::heat_kernel::{gaussian_kernel, heat_kernel, HeatKernelRequest};
use bridging_heat::resolvent::{calibrate_coupling, verify_resolvent_identity, SignedCoord, SpectralPoint};
use bridging_heat::scattering::{bridging_coefficients, reflection, transmission, Energy, ExtensionParamsIIa};
use bridging_heat::special::{bessel_j, gamma_real, ComplexArg, Order};
use bridging_heat::{Alpha, Result};
use num_complex::Complex64;

use crate::output::{Check, Report};

type Probe = fn() -> Result<(bool, String)>;

fn special_functions() -> Result<(bool, String)> {
    let g = (gamma_real(0.5)? - PI.sqrt()).abs();
    let x = 1.7;
    let j = bessel_j(Order::new(0.5)?, ComplexArg::new(Complex64::new(x, 0.0))?);
    let exact = (2.0 / (PI * x)).sqrt() * x.sin();
    let e = (j.re - exact).abs() + j.im.abs();
    Ok((g <= 1e-14 && e <= 1e-13, format!("Γ(1/2) error {g:.1e}, J_1/2 error {e:.1e}")))
}

fn free_kernel() -> Result<(bool, String)> {
    let a = Alpha::new(0.0)?;
    let kappa = calibrate_coupling(a)?;
    let mut worst: f64 = 0.0;
    for (x, y) in [(1.0, -1.0), (0.4, 2.3), (-2.5, -0.6)] {
        let req = HeatKernelRequest::new(a, 0.5, SignedCoord::new(x)?, SignedCoord::new(y)?, kappa);
        let exact = gaussian_kernel(0.5, x - y);
        worst = worst.max((heat_kernel(&req)?.value - exact).abs() / exact);
    }
    Ok((worst <= 1e-4, format!("max relative error {worst:.1e}")))
}

fn resolvent_identity() -> Result<(bool, String)> {
    let a = Alpha::new(0.5)?;
    let kappa = calibrate_coupling(a)?;
    let s = SpectralPoint::new(Complex64::new(-2.0, -1.0))?;
    let f = |x: f64| Complex64::new((-(x - 2.0f64).powi(2) * 4.0).exp(), 0.0);
    let c = verify_resolvent_identity(a, &s, kappa, f, (0.5, 3.5), 1e-3)?;
    Ok((c.residual <= 1e-3, format!("residual {:.1e}", c.residual)))
}

fn scattering() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for al in [0.0, 0.3, 0.7] {
        let a = Alpha::new(al)?;
        let (t, r) = bridging_coefficients(a);
        worst = worst.max((t - (1.0 + (PI * al).cos()) / 2.0).abs());
        let p = ExtensionParamsIIa::new(Complex64::new(0.6, 0.8), 1.5)?;
        for e in [1e-4, 1.0, 1e4] {
            let en = Energy::new(e)?;
            worst = worst.max((transmission(a, p, en) + reflection(a, p, en) - 1.0).abs());
        }
        worst = worst.max((t + r - 1.0).abs());
    }
    Ok((worst <= 1e-12, format!("max defect {worst:.1e}")))
}

fn bridging_conditions() -> Result<(bool, String)> {
    let a = Alpha::new(0.5)?;
    let d = InitialDatum::gaussian(2.0, 1.0);
    let g = grid_for_time(0.5, 12.0, &d)?;
    let u = Propagator::new(a)?.evolve(0.5, &d, &g)?.solution;
    let tr = boundary_traces(&u, a)?;
    let (r0, r1) = tr.bridging_residuals();
    let ok = r0 <= 1e-3 * tr.u0_plus.norm() && r1 <= 1e-3 * tr.u1_plus.norm().max(1.0);
    Ok((ok, format!("continuity {r0:.1e}, flux {r1:.1e}")))
}

fn weighted_heat() -> Result<(bool, String)> {
    let a = Alpha::new(0.5)?;
    let d = InitialDatum::gaussian(2.0, 1.0);
    let g = grid_for_time(1.0, 12.0, &d)?;
    let before = d.sample(&g)?.weighted_integral(0.5).re;
    let after = Propagator::new(a)?.evolve(1.0, &d, &g)?.solution.weighted_integral(0.5).re;
    let rel = (after - before).abs() / before;
    Ok((rel <= 1e-5, format!("relative change {rel:.1e}")))
}

fn classical_decay() -> Result<(bool, String)> {
    let f = classical_decay_fit(f64::INFINITY, 1.0, &log_times(1.0, 16.0, 9))?;
    let gap = (f.exponent - target_exponent(f64::INFINITY, 1.0)).abs();
    Ok((gap <= 0.03, format!("exponent {:.4}", f.exponent)))
}

const PROBES: [(&str, Probe); 7] = [
    ("special functions", special_functions),
    ("free heat kernel", free_kernel),
    ("resolvent identity", resolvent_identity),
    ("scattering unitarity", scattering),
    ("bridging conditions", bridging_conditions),
    ("weighted heat", weighted_heat),
    ("classical decay", classical_decay),
];

pub fn selftest() -> Report {
    let mut r = Report::default();
    for (name, probe) in PROBES {
        let (passed, detail) = match probe() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        r.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
    r
}
