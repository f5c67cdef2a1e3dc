//! In-memory report and its on-disk layout: `report.json`, one CSV per table
//! and `meta.json`, all free of timestamps and paths so reruns are
//! byte-identical.

use crate::{RunConfig, RunError};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Shortest round-trip form, switching to exponent notation for
            // very small or large magnitudes.
            Self::Num(v) => write!(f, "{v:?}"),
            Self::Int(v) => write!(f, "{v}"),
            Self::Text(s) => f.write_str(s),
            Self::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

/// Build a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::report::Cell::from($v)),*] };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row arity mismatch in table `{}`", self.name);
        self.rows.push(row);
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows whose `key` column renders as `value`.
    pub fn find<'a>(&'a self, key: &str, value: &'a str) -> impl Iterator<Item = &'a [Cell]> + 'a {
        let k = self.col(key);
        self.rows.iter().filter(move |r| k.is_some_and(|k| r[k].to_string() == value)).map(Vec::as_slice)
    }

    /// Numeric cell of `column` in the first row where `key == value`.
    pub fn number(&self, key: &str, value: &str, column: &str) -> Option<f64> {
        let c = self.col(column)?;
        self.find(key, value).next().and_then(|r| match r[c] {
            Cell::Num(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        })
    }

    /// CSV with leading `experiment` and `seed` columns.
    pub fn write_csv<W: std::io::Write>(&self, experiment: &str, seed: u64, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["experiment".to_string(), "seed".to_string()];
        header.extend(self.columns.iter().cloned());
        out.write_record(&header)?;
        let seed = seed.to_string();
        for r in &self.rows {
            let mut rec = vec![experiment.to_string(), seed.clone()];
            rec.extend(r.iter().map(Cell::to_string));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub n: usize,
    /// Fully resolved parameters, defaults included.
    pub params: Value,
    /// Design notes carried into the report header.
    pub notes: Vec<String>,
    pub summary: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new<P: Serialize>(experiment: &str, config: &RunConfig, n: usize, params: &P) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed: config.seed,
            n,
            params: serde_json::to_value(params).expect("parameters serialize"),
            notes: Vec::new(),
            summary: json!({}),
            tables: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_f64(&self, pointer: &str) -> Option<f64> {
        self.summary.pointer(pointer).and_then(Value::as_f64)
    }

    fn header(&self) -> Value {
        json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "version": VERSION,
        })
    }

    pub fn to_json(&self) -> String {
        let mut v = self.header();
        v["config"] = json!({ "experiment": self.experiment, "seed": self.seed, "n": self.n, "params": self.params });
        v["notes"] = json!(self.notes);
        v["summary"] = self.summary.clone();
        v["tables"] = json!(self.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>());
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    }

    fn meta_json(&self, files: &[String]) -> String {
        let mut v = self.header();
        v["n"] = json!(self.n);
        v["files"] = json!(files);
        v["rows"] = self.tables.iter().map(|t| (t.name.clone(), json!(t.rows.len()))).collect::<serde_json::Map<_, _>>().into();
        serde_json::to_string_pretty(&v).expect("meta serializes") + "\n"
    }

    /// Write every file into `dir` (created if missing); returns the paths.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
        let mut names = vec!["report.json".to_string()];
        let mut written = Vec::new();
        let report = dir.join("report.json");
        fs::write(&report, self.to_json()).map_err(|e| RunError::io(&report, e))?;
        written.push(report);
        for t in &self.tables {
            let name = format!("{}.csv", t.name);
            let path = dir.join(&name);
            let file = fs::File::create(&path).map_err(|e| RunError::io(&path, e))?;
            t.write_csv(&self.experiment, self.seed, std::io::BufWriter::new(file)).map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => RunError::io(&path, io),
                other => RunError::Computation(format!("{other:?}")),
            })?;
            names.push(name);
            written.push(path);
        }
        names.push("meta.json".to_string());
        let meta = dir.join("meta.json");
        fs::write(&meta, self.meta_json(&names)).map_err(|e| RunError::io(&meta, e))?;
        written.push(meta);
        Ok(written)
    }
}
