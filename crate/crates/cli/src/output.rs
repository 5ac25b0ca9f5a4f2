//! Deterministic plot-ready output: CSV files with '#' header comments and
//! 17-significant-digit floats (round-trip exact for f64), plus the JSON run
//! manifest written last.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

/// One float, 17 significant digits, locale-free. NaN prints as `nan`.
pub fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// A CSV file under the output directory; rows are buffered and written in
/// one shot with '\n' endings so identical runs are byte-identical.
pub struct CsvFile {
    path: PathBuf,
    name: String,
    buf: String,
    rows: usize,
}

impl CsvFile {
    pub fn new(dir: &Path, name: &str, comments: &[String], header: &str) -> Self {
        let mut buf = String::new();
        for c in comments {
            buf.push_str(&format!("# {c}\n"));
        }
        buf.push_str(header);
        buf.push('\n');
        Self {
            path: dir.join(name),
            name: name.to_string(),
            buf,
            rows: 0,
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
        self.rows += 1;
    }

    pub fn finish(self) -> std::io::Result<FileEntry> {
        let mut f = fs::File::create(&self.path)?;
        f.write_all(self.buf.as_bytes())?;
        Ok(FileEntry {
            name: self.name,
            rows: self.rows,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
pub struct EnergyFit {
    pub model: &'static str,
    /// [a, b] with E ~ a*exp(b*n) or E ~ a + b*n^2 over the bounce index n.
    pub params: [f64; 2],
    pub max_rel_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    #[serde(rename = "N")]
    pub order: u32,
    #[serde(rename = "dL")]
    pub dl: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_fit: Option<EnergyFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_band_halfwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theoretical_band_halfwidth: Option<f64>,
}

/// The run manifest: config echo, engine version, wall clock, every emitted
/// file with its row count, and the summary metrics.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub engine_version: &'a str,
    pub wall_clock_seconds: f64,
    pub config: &'a RunConfig,
    pub files: Vec<FileEntry>,
    pub summary: Summary,
}

impl Manifest<'_> {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        let mut f = fs::File::create(dir.join("manifest.json"))?;
        f.write_all(json.as_bytes())?;
        f.write_all(b"\n")
    }
}
