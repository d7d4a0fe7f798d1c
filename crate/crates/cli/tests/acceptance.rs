//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bridging_heat::dispersive::{bridging_decay, classical_decay_fit, log_times, target_exponent};
use bridging_heat::evolve::{boundary_traces, grid_for_time, lp_norm, InitialDatum, Propagator};
use bridging_heat::heat_kernel::{gaussian_kernel, heat_kernel, HeatKernelRequest};
use bridging_heat::resolvent::{calibrate_coupling, verify_resolvent_identity, SignedCoord, SpectralPoint};
use bridging_heat::scattering::*;
use bridging_heat::special::*;
use bridging_heat::Alpha;
use num_complex::Complex64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<u64>, Box<dyn Fn() -> Outcome>);

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

fn fig2() -> InitialDatum {
    InitialDatum::gaussian(2.0, 1.0)
}

/// xorshift64 in [0, 1): reproducible without a dependency.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Option<u64>, elapsed: Duration, out: Outcome) -> Outcome {
    match (limit, out) {
        (Some(s), Ok(d)) if elapsed > Duration::from_secs(s) => Err(format!("{d}; runtime {elapsed:.1?} exceeds {s} s")),
        (_, o) => o,
    }
}

fn free_kernel() -> Outcome {
    let a = alpha(0.0);
    let kappa = calibrate_coupling(a).map_err(|e| e.to_string())?;
    // nine equispaced points on [−3, 3], the origin moved to 0.1
    let xs: Vec<f64> = (0..9).map(|i| -3.0 + 0.75 * i as f64).map(|x| if x == 0.0 { 0.1 } else { x }).collect();
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0] {
        for &x in &xs {
            for &y in &xs {
                let req = HeatKernelRequest::new(a, t, SignedCoord::new(x).unwrap(), SignedCoord::new(y).unwrap(), kappa);
                let k = heat_kernel(&req).map_err(|e| format!("t={t} ({x},{y}): {e}"))?.value;
                let g = gaussian_kernel(t, x - y);
                worst = worst.max((k - g).abs() / g);
            }
        }
    }
    ensure(worst <= 1e-4, format!("max relative error {worst:.2e} over 2×81 points"))
}

fn resolvent_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.0, 0.25, 0.5, 0.9] {
        let al = alpha(a);
        let kappa = calibrate_coupling(al).map_err(|e| e.to_string())?;
        for z in [Complex64::new(-1.0, 0.0), Complex64::new(-2.0, -1.0)] {
            let s = SpectralPoint::new(z).unwrap();
            let f = |x: f64| Complex64::new((-((x - 2.0) / 0.3f64).powi(2)).exp(), 0.0);
            let c = verify_resolvent_identity(al, &s, kappa, f, (0.5, 3.5), 1e-3).map_err(|e| e.to_string())?;
            if c.grid_too_coarse {
                return Err(format!("alpha={a} z={z}: difference grid flagged as too coarse"));
            }
            worst = worst.max(c.residual);
        }
    }
    ensure(worst <= 1e-3, format!("max residual {worst:.2e}"))
}

fn scattering() -> Outcome {
    let mut rng = Rng(0x9e3779b97f4a7c15);
    let mut unitarity: f64 = 0.0;
    for _ in 0..1000 {
        let a = alpha(0.999 * rng.next());
        let p = ExtensionParamsIIa::new(Complex64::new(10.0 * rng.next() - 5.0, 10.0 * rng.next() - 5.0), 20.0 * rng.next() - 10.0).unwrap();
        let e = Energy::new(10f64.powf(16.0 * rng.next() - 8.0)).unwrap();
        unitarity = unitarity.max((transmission(a, p, e) + reflection(a, p, e) - 1.0).abs());
    }
    let mut reflectionless: f64 = 0.0;
    for _ in 0..10 {
        let a = alpha(0.02 + 0.96 * rng.next());
        let p = ExtensionParamsIIa::new(Complex64::from_polar(1.0, 2.0 * PI * rng.next()), 0.05 + 5.0 * rng.next()).unwrap();
        let e = reflectionless_energy(a, p).ok_or("no reflectionless energy for |a| = 1, γ > 0")?;
        reflectionless = reflectionless.max(reflection(a, p, e));
    }
    let (mut high, mut low): (f64, f64) = (0.0, 0.0);
    for al in [0.1, 0.5, 0.77] {
        for a in [Complex64::new(1.0, 0.0), Complex64::new(0.6, 0.8), Complex64::new(2.0, 0.0)] {
            for gamma in [-2.0, 0.5, 3.0] {
                let (al, p) = (alpha(al), ExtensionParamsIIa::new(a, gamma).unwrap());
                high = high.max((transmission(al, p, Energy::new(1e6).unwrap()) - high_energy_limits(al, p).0).abs());
                let lim = low_energy_limits(al, p).map_err(|e| e.to_string())?;
                low = low.max((transmission(al, p, Energy::new(1e-8).unwrap()) - lim.0).abs());
            }
        }
    }
    let mut bridging: f64 = 0.0;
    for k in 0..10 {
        let al = 0.095 * k as f64;
        let (t, r) = bridging_coefficients(alpha(al));
        bridging = bridging.max((t - (1.0 + (PI * al).cos()) / 2.0).abs()).max((r - (1.0 - (PI * al).cos()) / 2.0).abs());
    }
    let detail = format!(
        "|T+R−1| ≤ {unitarity:.1e}, R(E*) ≤ {reflectionless:.1e}, high-energy gap {high:.1e}, low-energy gap {low:.1e}, bridging {bridging:.1e}"
    );
    ensure(unitarity <= 1e-12 && reflectionless <= 1e-10 && high <= 1e-3 && low <= 1e-3 && bridging <= 1e-12, detail)
}

fn boundary_conditions() -> Outcome {
    let a = alpha(0.5);
    let d = fig2();
    let mut parts = Vec::new();
    let mut ok = true;
    for t in [0.5, 2.0] {
        let g = grid_for_time(t, 12.0, &d).map_err(|e| e.to_string())?;
        let u = Propagator::new(a).unwrap().evolve(t, &d, &g).map_err(|e| e.to_string())?.solution;
        let tr = boundary_traces(&u, a).map_err(|e| e.to_string())?;
        let (r0, r1) = tr.bridging_residuals();
        let (q0, q1) = (r0 / tr.u0_plus.norm(), r1 / tr.u1_plus.norm().max(1.0));
        ok &= q0 <= 1e-3 && q1 <= 1e-3;
        parts.push(format!("t={t}: continuity {q0:.1e}, flux {q1:.1e} (relative)"));
    }
    ensure(ok, parts.join("; "))
}

fn mass_conservation() -> Outcome {
    let d = fig2();
    let mass = PI.sqrt();
    let mut worst: (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut weighted: f64 = 0.0;
    for a in [0.25, 0.5] {
        for t in [0.5, 1.0, 2.0] {
            let g = grid_for_time(t, 12.0, &d).map_err(|e| e.to_string())?;
            let u = Propagator::new(alpha(a)).unwrap().evolve(t, &d, &g).map_err(|e| e.to_string())?.solution;
            let rel = (u.integral().re - mass).abs() / mass;
            if rel > worst.0 {
                worst = (rel, a, t);
            }
            let w0 = d.sample(&g).unwrap().weighted_integral(a).re;
            weighted = weighted.max((u.weighted_integral(a).re - w0).abs() / w0);
        }
    }
    // the weighted heat ∫|x|^{−α/2}u is what the flow preserves; shown for context
    ensure(
        worst.0 <= 1e-3,
        format!(
            "max |∫u − ∫φ|/∫φ = {:.3e} at alpha={} t={}; weighted heat drifts by at most {weighted:.1e}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn semigroup() -> Outcome {
    let d = fig2();
    let p = Propagator::new(alpha(0.5)).unwrap();
    let g = grid_for_time(0.5, 12.0, &d).map_err(|e| e.to_string())?;
    let whole = p.evolve(1.0, &d, &g).map_err(|e| e.to_string())?.solution;
    let half = p.evolve(0.5, &d, &g).map_err(|e| e.to_string())?.solution;
    let twice = p
        .evolve(0.5, &InitialDatum::Samples(half.values().to_vec()), &g)
        .map_err(|e| e.to_string())?
        .solution;
    let rel = lp_norm(&twice.sub(&whole).unwrap(), 2.0).unwrap() / lp_norm(&whole, 2.0).unwrap();
    ensure(rel <= 1e-3, format!("‖u(1) − u(½)∘u(½)‖₂/‖u(1)‖₂ = {rel:.2e}"))
}

/// Gamma by shifting to `x + 30` and summing Stirling's series there.
fn gamma_oracle(x: f64) -> f64 {
    let y = x + 30.0;
    let ln = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * y) - 1.0 / (360.0 * y.powi(3))
        + 1.0 / (1260.0 * y.powi(5))
        - 1.0 / (1680.0 * y.powi(7));
    ln.exp() / (0..30).map(|k| x + k as f64).product::<f64>()
}

fn special_functions() -> Outcome {
    let mut rng = Rng(0x2545f4914f6cdd1d);
    let mut fails = Vec::new();
    let sc = |nu: f64, z: Complex64| bessel_scaled_any_order(nu, z).unwrap();
    for _ in 0..2000 {
        let nu = 0.5 + 0.49 * rng.next();
        let z = Complex64::from_polar(0.1 + 49.9 * rng.next(), PI * (2.0 * rng.next() - 1.0));
        let (b, lo, hi) = (sc(nu, z), sc(nu - 1.0, z), sc(nu + 1.0, z));
        // Wronskian, with the common factor e^{2|Im z|} removed
        let jp = lo.j - nu / z * b.j;
        let yp = lo.y - nu / z * b.y;
        let w = b.j * yp - jp * b.y;
        let target = 2.0 / (PI * z) * (-2.0 * z.im.abs()).exp();
        let scale = (b.j * yp).norm().max((jp * b.y).norm()).max(target.norm());
        if (w - target).norm() > 1e-9 * (1.0 + 1.0 / z.norm()) * scale {
            fails.push(format!("Wronskian nu={nu} z={z}"));
        }
        for (m, c0, p) in [(lo.j, b.j, hi.j), (lo.y, b.y, hi.y)] {
            let mid = 2.0 * nu / z * c0;
            if (m + p - mid).norm() > 1e-9 * m.norm().max(p.norm()).max(mid.norm()) {
                fails.push(format!("recurrence nu={nu} z={z}"));
            }
        }
        let w = Complex64::from_polar(10f64.powf(6.0 * rng.next() - 3.0), PI * (2.0 * rng.next() - 1.0));
        let w = if w.im.abs() > 100.0 { Complex64::new(w.re, 100.0f64.copysign(w.im)) } else { w };
        let half = bessel_scaled(Order::new(0.5).unwrap(), ComplexArg::new(w).unwrap());
        let pre = (2.0 / (PI * w)).sqrt();
        let damp = (-w.im.abs()).exp();
        if (half.j - pre * w.sin() * damp).norm() > 1e-11 * pre.norm() || (half.y + pre * w.cos() * damp).norm() > 1e-11 * pre.norm() {
            fails.push(format!("half-order closed form at {w}"));
        }
        let x = 1e-3 + 1.999 * rng.next();
        if (gamma_real(x).unwrap() - gamma_oracle(x)).abs() > 1e-12 * gamma_oracle(x) {
            fails.push(format!("gamma at {x}"));
        }
    }
    ensure(fails.is_empty(), match fails.first() {
        None => "2000 samples each of Wronskian, recurrence, ν=1/2 closed forms, Γ".into(),
        Some(f) => format!("{} failures, first: {f}", fails.len()),
    })
}

fn dispersive() -> Outcome {
    let times = log_times(1.0, 16.0, 9);
    let mut parts = Vec::new();
    let mut ok = true;
    for (p, r) in [(f64::INFINITY, 1.0), (2.0, 2.0)] {
        let f = classical_decay_fit(p, r, &times).map_err(|e| e.to_string())?;
        let target = target_exponent(p, r);
        ok &= (f.exponent - target).abs() <= 0.03;
        parts.push(format!("(p,r)=({p},{r}): {:.4} vs {:.4}", f.exponent, target + 0.0));
    }
    // reported only: no target exists for the bridging flow
    let b = bridging_decay(&Propagator::new(alpha(0.5)).unwrap(), &fig2(), &grid_for_time(1.0, 12.0, &fig2()).unwrap(), &log_times(1.0, 8.0, 6))
        .map_err(|e| e.to_string())?;
    parts.push(format!(
        "bridging weighted sup {:.3} (residual {:.1e})",
        b.weighted_sup_fit.exponent, b.weighted_sup_fit.fit_residual
    ));
    ensure(ok, parts.join("; "))
}

const PRESETS: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

fn run_preset(name: &str, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_bridging-heat"))
        .args(["figure", name, "--out"])
        .arg(out)
        .env_remove("BRIDGING_HEAT_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{name}: {} {}", status.status, String::from_utf8_lossy(&status.stderr).trim()))
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn first_column(bytes: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(bytes).lines().map(|l| l.split(',').next().unwrap_or("").to_string()).collect()
}

fn figure_presets(root: &Path) -> Outcome {
    for name in PRESETS {
        run_preset(name, &root.join(name))?;
    }
    let fig5 = csv_files(&root.join("fig5"));
    let kinds: Vec<&str> = fig5.iter().map(|(n, _)| n.as_str()).collect();
    if kinds != ["fig5_bridging_t1.5.csv", "fig5_classical_t1.5.csv"] {
        return Err(format!("fig5 wrote {kinds:?}"));
    }
    ensure(first_column(&fig5[0].1) == first_column(&fig5[1].1), "all presets exit 0 with their checks passing; fig5 curves share the x column".into())
}

fn determinism(root: &Path) -> Outcome {
    let mut compared = 0;
    for name in PRESETS {
        let again = root.join(format!("{name}-again"));
        run_preset(name, &again)?;
        let (a, b) = (csv_files(&root.join(name)), csv_files(&again));
        if a.is_empty() || a != b {
            return Err(format!("{name}: CSV output differs between runs"));
        }
        compared += a.len();
    }
    Ok(format!("{compared} CSV files byte-identical across two runs"))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let root = tmp.path().to_path_buf();
    let root2 = root.clone();
    let criteria: Vec<Criterion> = vec![
        ("α=0 reduction", Some(60), Box::new(free_kernel)),
        ("resolvent identity", Some(30), Box::new(resolvent_identity)),
        ("scattering closed forms", Some(5), Box::new(scattering)),
        ("bridging boundary conditions", Some(120), Box::new(boundary_conditions)),
        ("mass conservation", None, Box::new(mass_conservation)),
        ("semigroup", None, Box::new(semigroup)),
        ("special functions", Some(5), Box::new(special_functions)),
        ("classical dispersive exponents", None, Box::new(dispersive)),
        ("figure presets", Some(180), Box::new(move || figure_presets(&root))),
        ("determinism", None, Box::new(move || determinism(&root2))),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let out = within(*limit, start.elapsed(), out);
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1} s]", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
