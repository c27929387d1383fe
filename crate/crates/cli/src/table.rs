//! Tabular output (CSV or JSON lines) and the manifest written next to every file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use cubedisc::quadrature::{QuadratureSpec, MEASURE_CONVENTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Seventeen significant digits, enough to read back the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => serde_json::to_string(v).expect("finite float"),
            Cell::Float(v) => serde_json::to_string(&v.to_string()).expect("string"),
            Cell::Text(s) => serde_json::to_string(s).expect("string"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Format::Jsonl => {
                for row in &self.rows {
                    out.push('{');
                    for (i, (c, v)) in self.columns.iter().zip(row).enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        let _ = write!(out, "\"{c}\":{}", v.json());
                    }
                    out.push_str("}\n");
                }
            }
        }
        out
    }
}

/// Provenance record stored beside each data file.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub timestamp: String,
    pub command: String,
    pub data_file: String,
    pub format: String,
    pub d: usize,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "M_list", skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub use_symmetry: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_count: Option<usize>,
    pub measure_convention: String,
    pub command_line: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: &str, d: usize, command_line: &str) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command: command.to_string(),
            data_file: String::new(),
            format: String::new(),
            d,
            m: None,
            m_list: None,
            alpha: None,
            method: None,
            nodes: None,
            seed: None,
            use_symmetry: None,
            r_count: None,
            measure_convention: MEASURE_CONVENTION.to_string(),
            command_line: command_line.to_string(),
            summary: None,
        }
    }

    pub fn with_quadrature(mut self, q: &QuadratureSpec) -> Self {
        self.method = Some(q.method.name().to_string());
        self.nodes = Some(q.nodes);
        self.seed = Some(q.seed);
        self.use_symmetry = Some(q.use_symmetry);
        self
    }
}

pub fn manifest_path(data: &Path) -> PathBuf {
    data.with_extension("manifest.json")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Writes `table` as `<dir>/<stem>.<ext>` with its manifest; returns the data path.
pub fn write_table(
    dir: &Path,
    stem: &str,
    table: &Table,
    format: Format,
    mut manifest: RunManifest,
) -> Result<PathBuf> {
    if table.rows.is_empty() {
        bail!("refusing to write {stem}: no rows");
    }
    ensure_dir(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    fs::write(&path, table.render(format)).with_context(|| format!("cannot write {}", path.display()))?;
    manifest.data_file = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    manifest.format = format.extension().to_string();
    let mpath = manifest_path(&path);
    let json = serde_json::to_string_pretty(&manifest).context("serialising manifest")?;
    fs::write(&mpath, json + "\n").with_context(|| format!("cannot write {}", mpath.display()))?;
    Ok(path)
}
