//! Tabular results with deterministic CSV emission. Metadata travels as
//! `#`-prefixed comment lines ahead of the RFC 4180 body; the wall time
//! is kept out of the emitted bytes so identical configuration and seed
//! reproduce identical files.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use crate::config::ExperimentConfig;
use crate::{CliError, Result};

#[derive(Clone, Debug)]
pub enum ColumnData {
    Real(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Real(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

#[derive(Clone, Debug, Default)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
    /// Reported on stderr only, never part of the CSV bytes.
    pub wall_time: Option<Duration>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_real(&mut self, name: &str, values: Vec<f64>) {
        self.columns.push(Column {
            name: name.into(),
            data: ColumnData::Real(values),
        });
    }

    pub fn push_text(&mut self, name: &str, values: Vec<String>) {
        self.columns.push(Column {
            name: name.into(),
            data: ColumnData::Text(values),
        });
    }

    pub fn insert_metadata(&mut self, key: &str, value: &str) {
        self.metadata.insert(key.into(), value.into());
    }

    /// Version, configuration hash and seed: the three entries every
    /// emitted table must carry.
    pub fn standard_metadata(&mut self, cfg: &ExperimentConfig) {
        self.insert_metadata("version", &code_version());
        self.insert_metadata("config_hash", &format!("{:016x}", cfg.config_hash()));
        self.insert_metadata("seed", &cfg.seed.to_string());
        self.insert_metadata("kind", &cfg.kind.label());
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(CliError::Numerical("result table has no columns".into()));
        }
        let rows = self.n_rows();
        for c in &self.columns {
            if c.data.len() != rows {
                return Err(CliError::Numerical(format!(
                    "column `{}` has {} rows, expected {rows}",
                    c.name,
                    c.data.len()
                )));
            }
        }
        for key in ["version", "config_hash", "seed"] {
            if !self.metadata.contains_key(key) {
                return Err(CliError::Numerical(format!("metadata `{key}` missing")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let header: Vec<String> = self.columns.iter().map(|c| quote_field(&c.name)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in 0..self.n_rows() {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| match &c.data {
                    ColumnData::Real(v) => format_real(v[row]),
                    ColumnData::Text(v) => quote_field(&v[row]),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

/// Fixed-width scientific notation keeps the emission independent of the
/// value's magnitude and of any locale.
fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        // NaN/inf are not valid CSV numbers; spell them out.
        format!("{x}")
    }
}

fn quote_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `git describe` of the working tree when available, the package
/// version otherwise (installed binaries, source tarballs).
pub fn code_version() -> String {
    let described = std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty());
    described.unwrap_or_else(|| env!("CARGO_PKG_VERSION").to_string())
}
