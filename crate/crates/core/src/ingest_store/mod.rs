//! Input loading and validation, report persistence and a digest-keyed
//! result cache.

mod cache;
mod loaders;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use cache::{Cache, CacheKey, CACHE_DIR_ENV};
pub use loaders::{
    canonical_edge_text, graph_edge_text, load_categories, load_citations, load_edge_list, load_id_list, load_observations,
    load_samples, load_series, load_year_pairs, YearPairs,
};
pub use report::{load_report, save_report, verify_inputs, Report, SCHEMA_VERSION, TOOL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Series,
    EdgeList,
    CitationNodes,
    CitationEdges,
    Category,
    Samples,
    IdList,
    YearPairs,
}

impl DatasetKind {
    /// Whether the digest is taken over a sorted canonical form.
    pub fn order_insensitive(self) -> bool {
        matches!(self, DatasetKind::EdgeList | DatasetKind::CitationEdges)
    }
}

/// A loaded input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub path: PathBuf,
    /// Hex SHA-256 of the file (of its canonical edge text for edge kinds).
    pub digest: String,
    /// Data rows accepted.
    pub rows: usize,
    #[serde(default)]
    pub duplicates: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    /// Malformed rows skipped (with a warning) before loading fails.
    pub error_budget: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| Error::Schema {
        path: path.into(),
        message: format!("not valid UTF-8: {e}"),
    })
}

/// Digest of a file as recorded in [`Dataset::digest`].
pub fn digest_file(path: &Path, kind: DatasetKind) -> Result<String> {
    if kind.order_insensitive() {
        let text = read_text(path)?;
        Ok(sha256_hex(canonical_edge_text(&text).as_bytes()))
    } else {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(sha256_hex(&bytes))
    }
}

/// Write via a sibling temporary file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::param(format!("{} is not a file path", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
