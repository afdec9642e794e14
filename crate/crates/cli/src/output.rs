//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// One CSV cell.
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Reals carry 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        // no "-0" in the output
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}

/// An in-memory CSV table with a header row.
pub struct Table {
    header: Vec<&'static str>,
    body: String,
    rows: usize,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            match c {
                Cell::Real(v) => self.body.push_str(&format_real(*v)),
                Cell::Int(v) => write!(self.body, "{v}").unwrap(),
                Cell::Bool(v) => self.body.push_str(if *v { "true" } else { "false" }),
            }
        }
        self.body.push_str("\r\n");
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push_str("\r\n");
        out.push_str(&self.body);
        out
    }
}

#[derive(Serialize)]
struct OutputEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    params: &'a Value,
    version: &'static str,
    created_at: String,
    outputs: Vec<OutputEntry>,
}

/// Collects the files of one run and finishes with `manifest.json`.
pub struct RunOutput {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl RunOutput {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> CliResult<()> {
        self.write_bytes(name, table.render().as_bytes())
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(OutputEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn finish(self, params: &Value) -> CliResult<PathBuf> {
        let manifest = Manifest {
            params,
            version: env!("CARGO_PKG_VERSION"),
            created_at: created_at()?,
            outputs: self.outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// UTC timestamp, pinned by `SOURCE_DATE_EPOCH` when set.
fn created_at() -> CliResult<String> {
    let when = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs: i64 = raw.trim().parse().map_err(|_| {
                CliError::Usage(format!("SOURCE_DATE_EPOCH={raw:?} is not an integer"))
            })?;
            DateTime::<Utc>::from_timestamp(secs, 0).ok_or_else(|| {
                CliError::Usage(format!("SOURCE_DATE_EPOCH={secs} is out of range"))
            })?
        }
        Err(_) => Utc::now(),
    };
    Ok(when.to_rfc3339_opts(SecondsFormat::Secs, true))
}
