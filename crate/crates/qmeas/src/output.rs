//! Report serialization and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::RunError;

/// Shortest decimal string that parses back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Small CSV builder; every row must have the header's width.
#[derive(Debug)]
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    width: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Self {
            writer,
            width: header.len(),
        }
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) {
        assert_eq!(fields.len(), self.width, "row width differs from header");
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("flushing to memory")
    }
}

/// A check that failed or a computation that could not be trusted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Anomaly {
    pub check: String,
    pub detail: String,
}

impl Anomaly {
    pub fn new(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            detail: detail.into(),
        }
    }
}

/// What an experiment produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: Vec<u8>,
    pub anomalies: Vec<Anomaly>,
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report types serialize");
    out.push(b'\n');
    out
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn sidecar(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn manifest_path(output: &Path) -> PathBuf {
    sidecar(output, ".manifest.json")
}

pub fn anomaly_path(output: &Path) -> PathBuf {
    sidecar(output, ".anomalies.json")
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub config: &'a ResolvedConfig,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub anomalies: &'a [Anomaly],
}

#[derive(Debug, Clone, Serialize)]
pub struct AnomalyReport<'a> {
    pub experiment: &'a str,
    pub output: &'a Path,
    pub anomalies: &'a [Anomaly],
}
