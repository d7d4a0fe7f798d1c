//! Presets reproducing the published figures, each with the qualitative
//! assertions the figure supports encoded as checks.

use bridging_heat::evolve::{boundary_traces, classical_heat_evolve, InitialDatum};
use bridging_heat::grid::SampledFunction;
use serde_json::json;

use crate::args::FigureName;
use crate::commands::Context;
use crate::error::{CliError, Stage};
use crate::output::{solution_csv, time_tag, Report};

/// Positions above which a hump is told apart from the `|x|^{-α/2}` peak.
pub const HUMP_REGION: f64 = 0.5;
/// Second differences are measured from this distance to the origin.
pub const SMOOTHNESS_REGION: f64 = 0.25;
pub const SECOND_DIFFERENCE_BOUND: f64 = 5.0;
pub const LEFT_MASS_FLOOR: f64 = 1e-3;

fn fig2_datum() -> InitialDatum {
    InitialDatum::gaussian(2.0, 1.0)
}

/// Local maxima of a sequence, counting a strictly larger endpoint as one.
pub fn local_maxima(values: &[f64]) -> usize {
    let n = values.len();
    if n < 2 {
        return n;
    }
    let interior = values.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count();
    interior + usize::from(values[0] > values[1]) + usize::from(values[n - 1] > values[n - 2])
}

/// Largest three-point second difference of `Re u` on either half-line,
/// skipping stencils that reach below `from`.
pub fn max_second_difference(u: &SampledFunction, from: f64) -> f64 {
    let xs = u.grid().half_nodes();
    let mut worst: f64 = 0.0;
    for positive in [true, false] {
        let v = u.side(positive);
        for j in 1..xs.len() - 1 {
            if xs[j - 1] < from {
                continue;
            }
            let (h0, h1) = (xs[j] - xs[j - 1], xs[j + 1] - xs[j]);
            let d2 = 2.0 * (v[j + 1].re * h0 - v[j].re * (h0 + h1) + v[j - 1].re * h1) / (h0 * h1 * (h0 + h1));
            worst = worst.max(d2.abs());
        }
    }
    worst
}

/// `(position, height)` of the largest `|u|` on `x ≥ from`.
fn hump(u: &SampledFunction, from: f64) -> (f64, f64) {
    let xs = u.grid().half_nodes();
    xs.iter()
        .zip(u.side(true))
        .filter(|(&x, _)| x >= from)
        .map(|(&x, v)| (x, v.norm()))
        .fold((0.0, 0.0), |best, p| if p.1 > best.1 { p } else { best })
}

pub fn figure(ctx: &Context, name: FigureName) -> Result<Report, CliError> {
    match name {
        FigureName::Fig2 => fig2(ctx),
        FigureName::Fig3 => fig3(ctx),
        FigureName::Fig4 => fig4(ctx),
        FigureName::Fig5 => fig5(ctx),
    }
}

fn fig2(ctx: &Context) -> Result<Report, CliError> {
    let d = fig2_datum();
    let times = [0.5, 2.0];
    let g = ctx.grid(&times, &d)?;
    let prop = ctx.propagator()?;
    let mut r = Report::default();
    let mut humps = Vec::new();
    for t in times {
        let u = prop.evolve(t, &d, &g).stage(&format!("fig2 evolution to t={t}"))?.solution;
        let tr = boundary_traces(&u, ctx.alpha).stage("fig2 traces")?;
        let (r0, r1) = tr.bridging_residuals();
        let far: Vec<f64> = u
            .grid()
            .half_nodes()
            .iter()
            .zip(u.side(true))
            .filter(|(&x, _)| x >= HUMP_REGION)
            .map(|(_, v)| v.norm())
            .collect();
        let count = far.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count();
        r.check(format!("single hump t={t}"), count == 1, format!("{count} interior maxima of |u| on x >= {HUMP_REGION}"));
        r.diag(format!("t{}", time_tag(t)), json!({ "continuity_residual": r0, "flux_residual": r1, "hump": hump(&u, HUMP_REGION) }));
        humps.push(hump(&u, HUMP_REGION));
        r.file(format!("fig2_t{}.csv", time_tag(t)), &solution_csv(&u));
    }
    r.check(
        "hump flattens",
        humps[1].1 < humps[0].1,
        format!("peak {:.4} at t=0.5, {:.4} at t=2", humps[0].1, humps[1].1),
    );
    Ok(r)
}

fn fig3(ctx: &Context) -> Result<Report, CliError> {
    let t = 1.5;
    let still = fig2_datum();
    let moving = InitialDatum::Gaussian { center: 2.0, width: 1.0, momentum: -3.0 };
    let g = ctx.grid(&[t], &moving)?;
    let prop = ctx.propagator()?;
    let mut r = Report::default();
    for (tag, d) in [("p0", &still), ("m3", &moving)] {
        let u = prop.evolve(t, d, &g).stage(&format!("fig3 evolution ({tag})"))?.solution;
        let right: Vec<f64> = u.side(true).iter().map(|v| v.norm()).collect();
        let n = local_maxima(&right);
        r.diag(format!("{tag}_local_maxima"), json!(n));
        if tag == "m3" {
            r.check("two maxima on x>0", n >= 2, format!("{n} local maxima of |u| on x > 0, endpoints included"));
        }
        r.file(format!("fig3_{tag}_t{}.csv", time_tag(t)), &solution_csv(&u));
    }
    Ok(r)
}

fn fig4(ctx: &Context) -> Result<Report, CliError> {
    let t = 0.5;
    let d = InitialDatum::Indicator { lo: 0.5, hi: 1.5 };
    let g = ctx.grid(&[t], &d)?;
    let u = ctx.propagator()?.evolve(t, &d, &g).stage("fig4 evolution")?.solution;
    let classical = classical_heat_evolve(t, &d, &g).stage("fig4 classical flow")?;
    let mut r = Report::default();
    let left: f64 = (0..g.len()).filter(|&i| g.point(i) < 0.0).map(|i| g.weight(i) * u.values()[i].re).sum();
    r.check("mass on x<0", left > LEFT_MASS_FLOOR, format!("left mass {left:.4e}"));
    let d2 = max_second_difference(&u, SMOOTHNESS_REGION);
    r.check(
        "bounded second difference",
        d2.is_finite() && d2 < SECOND_DIFFERENCE_BOUND,
        format!("max |u''| = {d2:.4} for |x| >= {SMOOTHNESS_REGION}"),
    );
    r.diag("classical_max_second_difference", json!(max_second_difference(&classical, SMOOTHNESS_REGION)));
    r.file(format!("fig4_bridging_t{}.csv", time_tag(t)), &solution_csv(&u));
    r.file(format!("fig4_classical_t{}.csv", time_tag(t)), &solution_csv(&classical));
    Ok(r)
}

fn fig5(ctx: &Context) -> Result<Report, CliError> {
    let t = 1.5;
    let d = fig2_datum();
    let g = ctx.grid(&[t], &d)?;
    let u = ctx.propagator()?.evolve(t, &d, &g).stage("fig5 evolution")?.solution;
    let classical = classical_heat_evolve(t, &d, &g).stage("fig5 classical flow")?;
    let mut r = Report::default();
    let shared = std::sync::Arc::ptr_eq(u.grid(), classical.grid());
    r.check("shared grid", shared, format!("{} points", g.len()));
    r.diag("bridging_hump", json!(hump(&u, HUMP_REGION)));
    r.diag("classical_hump", json!(hump(&classical, HUMP_REGION)));
    r.file(format!("fig5_bridging_t{}.csv", time_tag(t)), &solution_csv(&u));
    r.file(format!("fig5_classical_t{}.csv", time_tag(t)), &solution_csv(&classical));
    Ok(r)
}
