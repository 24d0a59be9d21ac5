//! Result tables, CSV files and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentId};
use crate::HarnessError;

/// Version string written into manifests.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Convention for the reference data `X_R`, recorded in every manifest.
pub const REFERENCE_CONVENTION: &str =
    "X_R is the single owner with the largest individual WD; B_ref = max(L(X_R) - L(X_T), 0)";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    /// Decimal rendering. Floats use the shortest string that round-trips.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// One CSV file's worth of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `proc_exo_rho_0`.
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Rows whose text columns equal the given values.
    pub fn select<'a>(&'a self, filter: &'a [(&str, &str)]) -> impl Iterator<Item = &'a [Cell]> + 'a {
        let idx: Vec<(usize, &str)> = filter
            .iter()
            .map(|(c, v)| (self.column(c).unwrap_or_else(|| panic!("no column {c}")), *v))
            .collect();
        self.rows
            .iter()
            .filter(move |r| idx.iter().all(|(i, v)| r[*i].render() == *v))
            .map(|r| r.as_slice())
    }

    /// Numeric column of the rows matching `filter`.
    pub fn values(&self, column: &str, filter: &[(&str, &str)]) -> Vec<f64> {
        let c = self.column(column).unwrap_or_else(|| panic!("no column {column}"));
        self.select(filter).filter_map(|r| r[c].as_f64()).collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    experiments: Vec<ExperimentId>,
    seed: u64,
    config: &'a ExperimentConfig,
    reference_data: &'static str,
    files: Vec<String>,
    wall_clock_seconds: f64,
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every table as `<name>.csv` plus `manifest.json` into `dir`,
/// creating it if needed. Returns the written paths.
pub fn emit(
    dir: &Path,
    cfg: &ExperimentConfig,
    experiments: &[ExperimentId],
    tables: &[Table],
    wall_clock_seconds: f64,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        let bytes = t.to_csv().map_err(|e| io_err(&path, e.into()))?;
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    let manifest = Manifest {
        version: VERSION,
        experiments: experiments.to_vec(),
        seed: cfg.seed,
        config: cfg,
        reference_data: REFERENCE_CONVENTION,
        files: tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
        wall_clock_seconds,
    };
    let path = dir.join("manifest.json");
    let mut f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    serde_json::to_writer_pretty(&mut f, &manifest).map_err(|e| io_err(&path, e.into()))?;
    f.write_all(b"\n").map_err(|e| io_err(&path, e))?;
    written.push(path);
    Ok(written)
}
