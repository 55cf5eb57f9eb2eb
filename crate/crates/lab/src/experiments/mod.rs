//! The experiment programs. Each takes a parameter struct (deserializable
//! from TOML or JSON, every field defaulted) and returns an
//! [`ExperimentReport`]. Replicates run on the rayon pool; each one is a
//! pure function of `(parameters, seed, replicate)`.

pub mod angle;
pub mod clt;
pub mod config;
pub mod geom;
pub mod stabilization;
pub mod stats;
pub mod tails;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use acycle_core::geometry::GeometryError;
use acycle_core::msa::MsaError;
use acycle_core::stochastic::ConfigError;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::io::{header, VERSION};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("replicate {replicate}: still degenerate after {attempts} attempts: {source}")]
    Degenerate {
        replicate: u64,
        attempts: u32,
        source: GeometryError,
    },
    #[error(transparent)]
    Geometry(GeometryError),
    #[error(transparent)]
    Msa(MsaError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<GeometryError> for ExperimentError {
    fn from(e: GeometryError) -> Self {
        ExperimentError::Geometry(e)
    }
}

impl From<MsaError> for ExperimentError {
    fn from(e: MsaError) -> Self {
        match e {
            MsaError::Geometry(g) => ExperimentError::Geometry(g),
            e => ExperimentError::Msa(e),
        }
    }
}

impl ExperimentError {
    pub fn is_degeneracy(&self) -> bool {
        match self {
            ExperimentError::Degenerate { .. } => true,
            ExperimentError::Geometry(g) => g.is_degeneracy(),
            _ => false,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Invalid(msg.into())
}

/// Stream of attempt `attempt` for replicate `replicate`: retries after a
/// degeneracy move to a fresh stream in the high half.
pub fn stream(replicate: u64, attempt: u32) -> u64 {
    replicate + ((attempt as u64) << 32)
}

/// Runs `f(attempt)` until it returns something other than a degeneracy.
pub(crate) fn with_retries<T>(
    replicate: u64,
    max_attempts: u32,
    mut f: impl FnMut(u32) -> Result<T, ExperimentError>,
) -> Result<(T, u32), ExperimentError> {
    let mut attempt = 0;
    loop {
        match f(attempt) {
            Ok(v) => return Ok((v, attempt)),
            Err(e) if e.is_degeneracy() => {
                attempt += 1;
                log::warn!("replicate {replicate}: {e}; resampling (attempt {attempt})");
                if attempt >= max_attempts {
                    let source = match e {
                        ExperimentError::Geometry(g) | ExperimentError::Degenerate { source: g, .. } => g,
                        _ => unreachable!(),
                    };
                    return Err(ExperimentError::Degenerate {
                        replicate,
                        attempts: attempt,
                        source,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// A plain table written as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = &str> + '_> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(move |r| r[i].as_str()))
    }

    fn write<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()
    }
}

pub(crate) fn cell(x: f64) -> String {
    x.to_string()
}

pub(crate) fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

pub(crate) fn bool_cell(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

/// Everything one experiment run produced.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub params: Value,
    pub summary: Value,
    pub ok: bool,
    /// Offending inputs of failed checks, serialized.
    pub failures: Vec<Value>,
    /// Human-readable verdict lines.
    pub lines: Vec<String>,
    #[serde(skip)]
    pub records: Table,
    #[serde(skip)]
    pub long: Table,
}

impl ExperimentReport {
    pub(crate) fn new<P: Serialize>(experiment: &str, params: &P) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            version: VERSION.to_string(),
            params: serde_json::to_value(params).expect("parameters serialize"),
            summary: Value::Null,
            ok: true,
            failures: Vec::new(),
            lines: Vec::new(),
            records: Table::default(),
            long: Table::default(),
        }
    }

    /// Writes `<experiment>.json`, `<experiment>_records.csv` and
    /// `<experiment>_long.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.experiment));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&json, text)?;
        let mut paths = vec![json];
        let h = header(&serde_json::json!({ "experiment": self.experiment, "params": self.params }));
        for (suffix, table) in [("records", &self.records), ("long", &self.long)] {
            let path = dir.join(format!("{}_{suffix}.csv", self.experiment));
            let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
            writeln!(f, "{h}")?;
            table.write(&mut f)?;
            f.flush()?;
            paths.push(path);
        }
        Ok(paths)
    }
}

pub(crate) fn points_value(points: &acycle_core::PointSet) -> Value {
    let rows: Vec<Value> = points
        .points()
        .iter()
        .map(|p| serde_json::json!({ "id": p.id, "coords": &p.coords[..points.dim()] }))
        .collect();
    Value::Array(rows)
}
