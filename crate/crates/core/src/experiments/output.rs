//! Tables, per-replica records and the metadata sidecar.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::FORMAT_VERSION;
use crate::error::Result;
use crate::rng::SEED_DERIVATION_VERSION;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // shortest round-trip form, so equal values print identically
            Cell::Float(x) => write!(f, "{x:?}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Text(s) => write!(f, "{s}"),
            Cell::Empty => Ok(()),
        }
    }
}

/// A CSV table; `to_csv` prefixes every row with the config hash.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut s = String::from("config_hash");
        for c in &self.columns {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for row in &self.rows {
            s.push_str(config_hash);
            for cell in row {
                let _ = write!(s, ",{cell}");
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub replica_index: u64,
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub format_version: u32,
    pub seed_derivation_version: u32,
    pub crate_version: String,
    pub git_hash: String,
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub jobs: usize,
    pub wall_time_s: f64,
    pub summary: serde_json::Value,
}

impl Metadata {
    pub fn new(command: &str, config_hash: &str, config: serde_json::Value, jobs: usize) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            seed_derivation_version: SEED_DERIVATION_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            git_hash: git_hash(),
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            config,
            jobs,
            wall_time_s: 0.0,
            summary: serde_json::Value::Null,
        }
    }
}

fn git_hash() -> String {
    if let Some(h) = option_env!("TORUS_VACANT_GIT_HASH") {
        return h.to_string();
    }
    std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

/// Paths written by [`write_outputs`].
#[derive(Clone, Debug)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub ndjson: PathBuf,
    pub metadata: PathBuf,
}

pub fn write_outputs(
    dir: &Path,
    command: &str,
    table: &Table,
    records: &[RunRecord],
    meta: &Metadata,
) -> Result<OutputPaths> {
    std::fs::create_dir_all(dir)?;
    let paths = OutputPaths {
        csv: dir.join(format!("{command}.csv")),
        ndjson: dir.join(format!("{command}.ndjson")),
        metadata: dir.join(format!("{command}.meta.json")),
    };
    std::fs::write(&paths.csv, table.to_csv(&meta.config_hash))?;
    let mut nd = std::io::BufWriter::new(std::fs::File::create(&paths.ndjson)?);
    for r in records {
        serde_json::to_writer(&mut nd, r)?;
        nd.write_all(b"\n")?;
    }
    nd.flush()?;
    std::fs::write(&paths.metadata, serde_json::to_string_pretty(meta)?)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["u", "mean", "note"]);
        t.push(vec![1usize.into(), 0.5.into(), Cell::Empty]);
        t.push(vec![2usize.into(), 0.1.into(), "x".into()]);
        assert_eq!(t.to_csv("h"), "config_hash,u,mean,note\nh,1,0.5,\nh,2,0.1,x\n");
    }

    #[test]
    fn writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let t = Table::new(&["a"]);
        let meta = Metadata::new("demo", "abc", serde_json::json!({}), 1);
        let rec = RunRecord {
            config_hash: "abc".into(),
            replica_index: 0,
            metrics: BTreeMap::from([("x".to_string(), 1.0)]),
            wall_time_s: 0.0,
        };
        let p = write_outputs(dir.path(), "demo", &t, &[rec], &meta).unwrap();
        assert_eq!(std::fs::read_to_string(p.csv).unwrap(), "config_hash,a\n");
        let line = std::fs::read_to_string(p.ndjson).unwrap();
        let back: RunRecord = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(back.metrics["x"], 1.0);
        assert!(std::fs::read_to_string(p.metadata).unwrap().contains("\"format_version\": 1"));
    }
}
