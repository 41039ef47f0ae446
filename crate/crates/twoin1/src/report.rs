//! CSV and JSON report files, named `<command>-<config hash>.<ext>`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

/// First 12 hex digits of the SHA-256 of the resolved config as JSON.
pub fn config_hash(config: &RunConfig) -> String {
    let json = serde_json::to_vec(config).expect("config serialises");
    let digest = Sha256::digest(&json);
    hex::encode(digest)[..12].to_string()
}

#[derive(Serialize)]
struct Metadata<'a, R: Serialize> {
    command: &'a str,
    version: &'a str,
    config_hash: &'a str,
    row_count: usize,
    notes: &'a [String],
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<&'a [R]>,
}

pub struct Report<R> {
    pub command: &'static str,
    pub rows: Vec<R>,
    pub notes: Vec<String>,
}

impl<R: Serialize> Report<R> {
    /// Writes the table (CSV) and its metadata (JSON), or one JSON file
    /// holding both. Returns the paths written.
    pub fn write(&self, dir: &Path, config: &RunConfig, format: Format) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let hash = config_hash(config);
        let stem = format!("{}-{hash}", self.command);
        let meta = Metadata {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            config_hash: &hash,
            row_count: self.rows.len(),
            notes: &self.notes,
            config,
            rows: (format == Format::Json).then_some(self.rows.as_slice()),
        };
        let mut written = Vec::new();
        if format == Format::Csv {
            let path = dir.join(format!("{stem}.csv"));
            write_file(&path, &self.csv_bytes()?)?;
            written.push(path);
        }
        let mut json = serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Output {
            path: dir.join(&stem),
            message: e.to_string(),
        })?;
        json.push(b'\n');
        let path = dir.join(format!("{stem}.json"));
        write_file(&path, &json)?;
        written.push(path);
        Ok(written)
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let fail = |message: String| CliError::Output {
            path: PathBuf::from(format!("{}.csv", self.command)),
            message,
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| fail(e.to_string()))?;
        }
        w.into_inner().map_err(|e| fail(e.to_string()))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
