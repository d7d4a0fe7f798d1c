//! CSV rendering and the run manifest. Data files carry no wall-clock
//! content; only the manifest has a timestamp.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use bridging_heat::grid::SampledFunction;
use serde_json::{json, Map, Value};

use crate::error::CliError;

/// 17 significant digits: doubles round-trip exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Times as they appear in file names: shortest exact decimal.
pub fn time_tag(t: f64) -> String {
    format!("{t}")
}

#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// `x, re, im, abs` for every grid point.
pub fn solution_csv(u: &SampledFunction) -> Csv {
    let mut csv = Csv::new(&["x", "re", "im", "abs"]);
    for (x, v) in u.grid().points().into_iter().zip(u.values()) {
        csv.row(vec![num(x), num(v.re), num(v.im), num(v.norm())]);
    }
    csv
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a command produces, held in memory until the single write.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub diagnostics: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn file(&mut self, name: impl Into<String>, csv: &Csv) {
        self.files.push((name.into(), csv.render()));
    }

    pub fn diag(&mut self, key: impl Into<String>, value: Value) {
        self.diagnostics.insert(key.into(), value);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes the data files and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, report: &Report, manifest: Value) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for (name, content) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(io(&path))?;
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is plain JSON");
    std::fs::write(&path, text + "\n").map_err(io(&path))
}

pub fn timestamp() -> Value {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({ "unix_seconds": secs })
}

pub fn checks_json(report: &Report) -> Value {
    Value::Array(
        report
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect(),
    )
}
