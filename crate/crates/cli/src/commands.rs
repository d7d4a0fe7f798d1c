use std::sync::Arc;

use bridging_heat::contour::{Contour, InverseLaplaceOptions, DEFAULT_SCALE, MAX_NODES};
use bridging_heat::dispersive::{
    bridging_decay, classical_datum_fit, classical_decay_fit, log_times, target_exponent, DecayFit,
};
use bridging_heat::evolve::{boundary_traces, grid_for_time, lp_norm, InitialDatum, Propagator};
use bridging_heat::extensions::{bc_residual, bridging_spec, ExtensionSpec};
use bridging_heat::grid::{self, SpatialGrid};
use bridging_heat::heat_kernel::{heat_kernel, vertical_contour, HeatKernelRequest, VERTICAL_ABSCISSA, VERTICAL_MAX_NODES};
use bridging_heat::resolvent::{SignedCoord, CALIBRATION_POINTS, KAPPA_VERBATIM};
use bridging_heat::scattering::{
    high_energy_limits, low_energy_limits, reflection, reflectionless_energy, transmission, Energy, ExtensionParamsIIa,
};
use bridging_heat::{evolve, special, Alpha};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{ContourChoice, RunConfig};
use crate::error::{CliError, Stage};
use crate::output::{num, solution_csv, time_tag, Csv, Report};

pub const BC_TOLERANCE: f64 = 1e-3;
pub const CLASSICAL_WINDOW: (f64, f64, usize) = (1.0, 16.0, 9);
pub const BRIDGING_WINDOW: (f64, f64, usize) = (1.0, 8.0, 6);
pub const EXPONENT_TOLERANCE: f64 = 0.03;

/// Validated run parameters shared by all commands.
pub struct Context {
    pub cfg: RunConfig,
    pub alpha: Alpha,
    pub kappa: Complex64,
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self, CliError> {
        let alpha = Alpha::new(cfg.alpha).map_err(|e| CliError::Config(e.to_string()))?;
        let kappa = cfg.kappa.kappa(alpha).stage("coupling calibration")?;
        Ok(Self { cfg, alpha, kappa })
    }

    pub fn propagator(&self) -> Result<Propagator, CliError> {
        if self.cfg.contour == ContourChoice::Vertical {
            return Err(CliError::Config(
                "the vertical contour is only available for pointwise kernels; use --contour talbot".into(),
            ));
        }
        Ok(Propagator::with_mode(self.alpha, self.cfg.kappa)
            .stage("coupling calibration")?
            .with_contour(Contour::talbot(self.cfg.nodes)))
    }

    /// Grid resolving the earliest requested time.
    pub fn grid(&self, times: &[f64], datum: &InitialDatum) -> Result<Arc<SpatialGrid>, CliError> {
        let t = times.iter().copied().fold(f64::INFINITY, f64::min);
        grid_for_time(t, self.cfg.grid_length, datum).stage("grid construction")
    }

    /// Every run parameter plus the library defaults it depends on.
    pub fn manifest_parameters(&self, command: &str) -> Value {
        let c = &self.cfg;
        let contour = Contour::talbot(c.nodes);
        json!({
            "command": command,
            "alpha": c.alpha,
            "t": c.times,
            "t_explicit": c.times_set,
            "datum": c.datum_spec,
            "grid_L": c.grid_length,
            "contour": c.contour.name(),
            "nodes": c.nodes,
            "kappa_mode": format!("{:?}", c.kappa).to_lowercase(),
            "out": c.out.display().to_string(),
            "x": c.x,
            "y": c.y,
            "a": c_json(c.a),
            "gamma": c.gamma,
            "energies": c.energies,
        })
        .as_object()
        .cloned()
        .map(|mut m| {
            m.insert("coupling".into(), json!({
                "kappa": c_json(self.kappa),
                "kappa_verbatim": c_json(KAPPA_VERBATIM),
                "kappa_over_kappa_verbatim": c_json(self.kappa / KAPPA_VERBATIM),
                "calibration_points": CALIBRATION_POINTS.iter().map(|z| c_json(*z)).collect::<Vec<_>>(),
            }));
            m.insert("defaults".into(), json!({
                "grid": {
                    "length": grid::DEFAULT_LENGTH,
                    "panel_width": grid::DEFAULT_PANEL_WIDTH,
                    "grading": grid::DEFAULT_GRADING,
                    "inner_radius": grid::DEFAULT_INNER_RADIUS,
                    "order": grid::DEFAULT_ORDER,
                    "max_panel_decay": evolve::MAX_PANEL_DECAY,
                    "tail_budget": evolve::TAIL_BUDGET,
                },
                "contour": {
                    "talbot_params": contour.params(),
                    "talbot_scale": DEFAULT_SCALE,
                    "max_nodes": MAX_NODES,
                    "doubling_tolerance": InverseLaplaceOptions::default().tol,
                    "absolute_floor": InverseLaplaceOptions::default().abs_floor,
                    "vertical_abscissa": VERTICAL_ABSCISSA,
                    "vertical_max_nodes": VERTICAL_MAX_NODES,
                },
                "special_functions": {
                    "series_radius": special::SERIES_RADIUS,
                    "asymptotic_radius": special::ASYMPTOTIC_RADIUS,
                    "envelope_modulus": special::ENVELOPE_MODULUS,
                    "envelope_imag": special::ENVELOPE_IMAG,
                },
                "traces": { "window": [evolve::TRACE_WINDOW.0, evolve::TRACE_WINDOW.1], "bc_tolerance": BC_TOLERANCE },
                "scattering": { "unit_modulus_tolerance": bridging_heat::scattering::UNIT_MODULUS_TOL },
                "decay": {
                    "classical_window": [CLASSICAL_WINDOW.0, CLASSICAL_WINDOW.1, CLASSICAL_WINDOW.2],
                    "bridging_window": [BRIDGING_WINDOW.0, BRIDGING_WINDOW.1, BRIDGING_WINDOW.2],
                    "exponent_tolerance": EXPONENT_TOLERANCE,
                },
            }));
            Value::Object(m)
        })
        .expect("object literal")
    }
}

fn coord(x: f64) -> Result<SignedCoord, CliError> {
    SignedCoord::new(x).map_err(|e| CliError::Config(e.to_string()))
}

pub fn kernel(ctx: &Context) -> Result<Report, CliError> {
    let c = &ctx.cfg;
    let mut csv = Csv::new(&["t", "x", "y", "K"]);
    let (mut worst_imag, mut worst_change, mut max_nodes) = (0.0f64, 0.0f64, 0usize);
    for &t in &c.times {
        for &x in &c.x {
            for &y in &c.y {
                let (xc, yc) = (coord(x)?, coord(y)?);
                let contour = match c.contour {
                    ContourChoice::Talbot => Contour::talbot(c.nodes),
                    ContourChoice::Vertical => vertical_contour(t, xc, yc).stage("kernel contour")?,
                };
                let k = heat_kernel(&HeatKernelRequest::new(ctx.alpha, t, xc, yc, ctx.kappa).with_contour(contour))
                    .stage(&format!("heat kernel at t={t}, x={x}, y={y}"))?;
                worst_imag = worst_imag.max(k.imag_residue);
                worst_change = worst_change.max(k.doubling_change);
                max_nodes = max_nodes.max(k.nodes);
                csv.row(vec![num(t), num(x), num(y), num(k.value)]);
            }
        }
    }
    let mut r = Report::default();
    r.file("kernel.csv", &csv);
    r.diag("max_imag_residue", json!(worst_imag));
    r.diag("max_doubling_change", json!(worst_change));
    r.diag("max_nodes", json!(max_nodes));
    Ok(r)
}

pub fn evolve_cmd(ctx: &Context) -> Result<Report, CliError> {
    let c = &ctx.cfg;
    let prop = ctx.propagator()?;
    let g = ctx.grid(&c.times, &c.datum)?;
    let phi = c.datum.sample(&g).stage("datum sampling")?;
    let weighted0 = phi.weighted_integral(c.alpha).re;
    let mut r = Report::default();
    let mut per_time = Vec::new();
    for &t in &c.times {
        let ev = prop.evolve(t, &c.datum, &g).stage(&format!("evolution to t={t}"))?;
        r.file(format!("evolve_t{}.csv", time_tag(t)), &solution_csv(&ev.solution));
        per_time.push(json!({
            "t": t,
            "nodes": ev.nodes,
            "doubling_change": ev.doubling_change,
            "l2": lp_norm(&ev.solution, 2.0).stage("norms")?,
            "mass": ev.solution.integral().re,
            "weighted_mass_change": ev.solution.weighted_integral(c.alpha).re - weighted0,
        }));
    }
    r.diag("grid_points", json!(g.len()));
    r.diag("initial_mass", json!(phi.integral().re));
    r.diag("evolutions", Value::Array(per_time));
    Ok(r)
}

pub fn scatter(ctx: &Context) -> Result<Report, CliError> {
    let c = &ctx.cfg;
    let p = ExtensionParamsIIa::new(c.a, c.gamma).map_err(|e| CliError::Config(e.to_string()))?;
    let mut csv = Csv::new(&["alpha", "E", "T", "R"]);
    let mut unitarity = 0.0f64;
    for &e in &c.energies {
        let en = Energy::new(e).map_err(|err| CliError::Config(err.to_string()))?;
        let (t, rr) = (transmission(ctx.alpha, p, en), reflection(ctx.alpha, p, en));
        unitarity = unitarity.max((t + rr - 1.0).abs());
        csv.row(vec![num(c.alpha), num(e), num(t), num(rr)]);
    }
    let mut r = Report::default();
    r.file("scatter.csv", &csv);
    r.diag("max_unitarity_defect", json!(unitarity));
    r.diag("high_energy_limits", json!(high_energy_limits(ctx.alpha, p)));
    r.diag(
        "low_energy_limits",
        low_energy_limits(ctx.alpha, p).map(|l| json!(l)).unwrap_or(Value::Null),
    );
    r.diag(
        "reflectionless_energy",
        reflectionless_energy(ctx.alpha, p).map(|e| json!(e.value())).unwrap_or(Value::Null),
    );
    Ok(r)
}

pub fn bc_check(ctx: &Context) -> Result<Report, CliError> {
    let c = &ctx.cfg;
    let prop = ctx.propagator()?;
    let g = ctx.grid(&c.times, &c.datum)?;
    let configured = ExtensionSpec::IIa { a: c.a, gamma: c.gamma };
    let mut csv = Csv::new(&[
        "t", "u0_minus_re", "u0_minus_im", "u0_plus_re", "u0_plus_im", "u1_minus_re", "u1_minus_im", "u1_plus_re",
        "u1_plus_im", "spread", "continuity_residual", "flux_residual", "friedrichs_residual", "configured_residual",
    ]);
    let mut r = Report::default();
    for &t in &c.times {
        let u = prop.evolve(t, &c.datum, &g).stage(&format!("evolution to t={t}"))?.solution;
        let tr = boundary_traces(&u, ctx.alpha).stage("trace extrapolation")?;
        let (r0, r1) = tr.bridging_residuals();
        let fried = bc_residual(&ExtensionSpec::Friedrichs, &tr).into_iter().fold(0.0, f64::max);
        let conf = bc_residual(&configured, &tr).into_iter().fold(0.0, f64::max);
        csv.row(vec![
            num(t),
            num(tr.u0_minus.re),
            num(tr.u0_minus.im),
            num(tr.u0_plus.re),
            num(tr.u0_plus.im),
            num(tr.u1_minus.re),
            num(tr.u1_minus.im),
            num(tr.u1_plus.re),
            num(tr.u1_plus.im),
            num(tr.spread),
            num(r0),
            num(r1),
            num(fried),
            num(conf),
        ]);
        let b0 = BC_TOLERANCE * tr.u0_plus.norm();
        let b1 = BC_TOLERANCE * tr.u1_plus.norm().max(1.0);
        r.check(format!("continuity t={t}"), r0 <= b0, format!("|u0- - u0+| = {r0:.3e}, bound {b0:.3e}"));
        r.check(format!("flux t={t}"), r1 <= b1, format!("|u1- + u1+| = {r1:.3e}, bound {b1:.3e}"));
    }
    r.file("bc_check.csv", &csv);
    r.diag("bridging_spec", json!(format!("{:?}", bridging_spec())));
    r.diag("configured_spec", json!(format!("{configured:?}")));
    Ok(r)
}

fn fit_row(csv: &mut Csv, flow: &str, quantity: &str, f: &DecayFit, target: Option<f64>) {
    csv.row(vec![
        flow.into(),
        quantity.into(),
        num(f.p),
        num(f.r),
        num(f.exponent),
        // + 0.0 drops the sign of a zero target
        target.map(|t| num(t + 0.0)).unwrap_or_default(),
        num(f.prefactor),
        num(f.fit_residual),
        num(f.time_window.0),
        num(f.time_window.1),
    ]);
}

pub fn decay(ctx: &Context) -> Result<Report, CliError> {
    let c = &ctx.cfg;
    let (classical_times, bridging_times) = if c.times_set {
        (c.times.clone(), c.times.clone())
    } else {
        let (a, b, n) = CLASSICAL_WINDOW;
        let (d, e, m) = BRIDGING_WINDOW;
        (log_times(a, b, n), log_times(d, e, m))
    };
    let mut csv = Csv::new(&[
        "flow", "quantity", "p", "r", "exponent", "target", "prefactor", "fit_residual", "t_lo", "t_hi",
    ]);
    let mut r = Report::default();
    let inf = f64::INFINITY;
    for (p, rr) in [(inf, 1.0), (2.0, 2.0), (inf, 2.0)] {
        let f = classical_decay_fit(p, rr, &classical_times).stage("classical operator-norm fit")?;
        let target = target_exponent(p, rr);
        fit_row(&mut csv, "classical", "operator_norm", &f, Some(target));
        if p.is_infinite() && rr == 1.0 || p == 2.0 {
            let gap = (f.exponent - target).abs();
            r.check(
                format!("classical exponent p={p} r={rr}"),
                gap <= EXPONENT_TOLERANCE,
                format!("fitted {:.4}, target {target:.4}", f.exponent),
            );
        }
    }
    let g = ctx.grid(&bridging_times, &c.datum)?;
    for (p, rr) in [(inf, 2.0), (2.0, 2.0)] {
        let f = classical_datum_fit(&c.datum, &g, p, rr, &classical_times).stage("classical datum fit")?;
        fit_row(&mut csv, "classical", "datum", &f, Some(target_exponent(p, rr)));
    }
    let b = bridging_decay(&ctx.propagator()?, &c.datum, &g, &bridging_times).stage("bridging decay")?;
    fit_row(&mut csv, "bridging", "l2", &b.l2_fit, None);
    fit_row(&mut csv, "bridging", "weighted_sup", &b.weighted_sup_fit, None);
    fit_row(&mut csv, "bridging", "weighted_gradient_l2", &b.gradient_fit, None);
    let mut samples = Csv::new(&["t", "l2", "weighted_sup", "weighted_gradient_l2"]);
    for s in &b.samples {
        samples.row(vec![num(s.t), num(s.l2), num(s.weighted_sup), num(s.weighted_gradient_l2)]);
    }
    r.file("decay.csv", &csv);
    r.file("decay_samples.csv", &samples);
    r.diag("bridging_fit_residuals", json!({
        "l2": b.l2_fit.fit_residual,
        "weighted_sup": b.weighted_sup_fit.fit_residual,
        "weighted_gradient_l2": b.gradient_fit.fit_residual,
    }));
    Ok(r)
}
