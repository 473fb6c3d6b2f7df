//! Machine-readable suite reports: one row per check, JSON + CSV emission.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
    /// "predicted" (from the parameter algebra) or "fitted" (constant fixed
    /// by the data itself)
    pub provenance: &'static str,
    pub wall_ms: u128,
    pub evals: usize,
}

impl CheckRow {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tol: f64,
        pass: bool,
        provenance: &'static str,
    ) -> Self {
        CheckRow {
            name: name.into(),
            measured,
            expected,
            tol,
            pass,
            provenance,
            wall_ms: 0,
            evals: 0,
        }
    }

    pub fn timed(mut self, wall_ms: u128, evals: usize) -> Self {
        self.wall_ms = wall_ms;
        self.evals = evals;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub config_hash: String,
    pub pass: bool,
    pub rows: Vec<CheckRow>,
}

impl Report {
    pub fn new(suite: &str, config_hash: u64, rows: Vec<CheckRow>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Report {
            schema_version: REPORT_SCHEMA,
            suite: suite.to_string(),
            config_hash: format!("{config_hash:016x}"),
            pass,
            rows,
        }
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        let text = serde_json::to_string_pretty(self).expect("serializable report");
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")
    }

    pub fn print_summary(&self) {
        for r in &self.rows {
            println!(
                "{} {:<44} {}  measured {:+.6e}  expected {:+.6e}  tol {:.1e} [{}]",
                self.suite,
                r.name,
                if r.pass { "PASS" } else { "FAIL" },
                r.measured,
                r.expected,
                r.tol,
                r.provenance,
            );
        }
    }
}

/// CSV with a commented header describing the columns.
pub struct CsvWriter {
    file: std::fs::File,
}

impl CsvWriter {
    pub fn create(path: &Path, comment: &str, columns: &[&str]) -> std::io::Result<Self> {
        let mut file = std::fs::File::create(path)?;
        writeln!(file, "# {comment}")?;
        writeln!(file, "{}", columns.join(","))?;
        Ok(CsvWriter { file })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        writeln!(self.file, "{}", fields.join(","))
    }
}

/// Fixed float formatting so identical runs emit byte-identical files.
pub fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}
