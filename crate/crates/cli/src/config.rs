//! Run configuration, assembled from defaults, a `key = value` file, the
//! output-directory environment variable and command-line flags, in
//! increasing order of precedence.

use std::path::{Path, PathBuf};

use bridging_heat::evolve::InitialDatum;
use bridging_heat::resolvent::CouplingMode;
use num_complex::Complex64;

use crate::error::CliError;

pub const OUT_ENV: &str = "BRIDGING_HEAT_OUT";

/// Keys accepted in configuration files; each mirrors the flag `--<key>`.
pub const KEYS: [&str; 13] = [
    "alpha", "t", "datum", "grid-L", "contour", "nodes", "kappa", "out", "x", "y", "a", "gamma", "energies",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourChoice {
    Talbot,
    Vertical,
}

impl ContourChoice {
    pub fn name(self) -> &'static str {
        match self {
            ContourChoice::Talbot => "talbot",
            ContourChoice::Vertical => "vertical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub times: Vec<f64>,
    /// Whether `t` was given explicitly (commands with their own time
    /// windows fall back to them otherwise).
    pub times_set: bool,
    pub datum: InitialDatum,
    pub datum_spec: String,
    pub grid_length: f64,
    pub contour: ContourChoice,
    pub nodes: usize,
    pub kappa: CouplingMode,
    pub out: PathBuf,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub a: Complex64,
    pub gamma: f64,
    pub energies: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            times: vec![0.5],
            times_set: false,
            datum: InitialDatum::gaussian(2.0, 1.0),
            datum_spec: "gaussian:2,1".into(),
            grid_length: bridging_heat::grid::DEFAULT_LENGTH,
            contour: ContourChoice::Talbot,
            nodes: bridging_heat::contour::DEFAULT_NODES,
            kappa: CouplingMode::Calibrated,
            out: PathBuf::from("out"),
            x: vec![1.0],
            y: vec![-1.0],
            a: Complex64::new(1.0, 0.0),
            gamma: 0.0,
            energies: vec![0.1, 1.0, 10.0],
        }
    }
}

fn number(v: &str) -> Result<f64, String> {
    let x: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{v}` is not finite"));
    }
    Ok(x)
}

fn list(v: &str) -> Result<Vec<f64>, String> {
    let xs = v.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if xs.is_empty() {
        return Err("empty list".into());
    }
    Ok(xs)
}

fn positive_list(v: &str) -> Result<Vec<f64>, String> {
    let xs = list(v)?;
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(format!("all values must be positive, got `{v}`"));
    }
    Ok(xs)
}

fn nonzero_list(v: &str) -> Result<Vec<f64>, String> {
    let xs = list(v)?;
    if xs.contains(&0.0) {
        return Err("positions must avoid the origin".into());
    }
    Ok(xs)
}

/// `gaussian:center,width[,momentum]` or `indicator:lo,hi`.
pub fn parse_datum(v: &str) -> Result<InitialDatum, String> {
    let (kind, args) = v
        .split_once(':')
        .ok_or_else(|| format!("`{v}`: expected gaussian:center,width[,momentum] or indicator:lo,hi"))?;
    let args = list(args)?;
    let datum = match (kind.trim(), args.as_slice()) {
        ("gaussian", &[center, width]) => InitialDatum::gaussian(center, width),
        ("gaussian", &[center, width, momentum]) => InitialDatum::Gaussian { center, width, momentum },
        ("indicator", &[lo, hi]) => InitialDatum::Indicator { lo, hi },
        _ => return Err(format!("`{v}`: expected gaussian:center,width[,momentum] or indicator:lo,hi")),
    };
    datum.validate().map_err(|e| e.to_string())?;
    Ok(datum)
}

/// `re` or `re,im`.
fn parse_complex(v: &str) -> Result<Complex64, String> {
    match *list(v)?.as_slice() {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(format!("`{v}`: expected re or re,im")),
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "alpha" => {
                let a = number(value)?;
                if !(0.0..1.0).contains(&a) {
                    return Err(format!("must lie in [0, 1), got {a}"));
                }
                self.alpha = a;
            }
            "t" => {
                self.times = positive_list(value)?;
                self.times_set = true;
            }
            "datum" => {
                self.datum = parse_datum(value)?;
                self.datum_spec = value.to_string();
            }
            "grid-L" => {
                let l = number(value)?;
                if !(l >= 1.0) {
                    return Err(format!("must be at least 1, got {l}"));
                }
                self.grid_length = l;
            }
            "contour" => {
                self.contour = match value {
                    "talbot" => ContourChoice::Talbot,
                    "vertical" => ContourChoice::Vertical,
                    _ => return Err(format!("expected talbot or vertical, got `{value}`")),
                }
            }
            "nodes" => {
                let n: usize = value.parse().map_err(|_| format!("`{value}` is not a node count"))?;
                let cap = bridging_heat::contour::MAX_NODES;
                if !(2..=cap).contains(&n) {
                    return Err(format!("must lie in 2..={cap}, got {n}"));
                }
                self.nodes = n;
            }
            "kappa" => {
                self.kappa = match value {
                    "calibrated" => CouplingMode::Calibrated,
                    "verbatim" => CouplingMode::Verbatim,
                    _ => return Err(format!("expected calibrated or verbatim, got `{value}`")),
                }
            }
            "out" => {
                if value.is_empty() {
                    return Err("empty output path".into());
                }
                self.out = PathBuf::from(value);
            }
            "x" => self.x = nonzero_list(value)?,
            "y" => self.y = nonzero_list(value)?,
            "a" => self.a = parse_complex(value)?,
            "gamma" => self.gamma = number(value)?,
            "energies" => self.energies = positive_list(value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }
}

/// `(line, key, value)` triples of a configuration file.
pub fn parse_config_text(text: &str) -> Result<Vec<(usize, String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {line}: expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("line {line}: unknown key `{key}`")));
        }
        out.push((line, key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Layers defaults < file < environment < flags.
pub fn resolve(
    config_file: Option<&Path>,
    env_out: Option<String>,
    flags: &[(&str, Option<&String>)],
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = config_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let entries = parse_config_text(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        for (line, key, value) in entries {
            cfg.set(&key, &value)
                .map_err(|e| CliError::Config(format!("{}: line {line}, key `{key}`: {e}", path.display())))?;
        }
    }
    if let Some(out) = env_out.filter(|s| !s.is_empty()) {
        cfg.set("out", &out)
            .map_err(|e| CliError::Config(format!("{OUT_ENV}: {e}")))?;
    }
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)
                .map_err(|e| CliError::Config(format!("--{key}: {e}")))?;
        }
    }
    Ok(cfg)
}
