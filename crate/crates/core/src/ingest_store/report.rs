use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{digest_file, read_text, write_atomic, Dataset};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Versioned JSON envelope around any analysis result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub tool_version: String,
    pub kind: String,
    #[serde(default)]
    pub inputs: Vec<Dataset>,
    pub body: T,
}

impl<T> Report<T> {
    pub fn new(kind: impl Into<String>, inputs: Vec<Dataset>, body: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            kind: kind.into(),
            inputs,
            body,
        }
    }
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn save_report<T: Serialize>(report: &Report<T>, path: &Path) -> Result<()> {
    write_atomic(path, report.to_json()?.as_bytes())
}

pub fn load_report<T: DeserializeOwned>(path: &Path) -> Result<Report<T>> {
    let text = read_text(path)?;
    let schema = |message: String| Error::Schema { path: path.into(), message };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?;
    match value.get("schema_version").and_then(serde_json::Value::as_u64) {
        None => return Err(schema("report has no schema_version".into())),
        Some(v) if v != u64::from(SCHEMA_VERSION) => {
            return Err(schema(format!("schema_version {v} is not supported (expected {SCHEMA_VERSION})")))
        }
        Some(_) => {}
    }
    if value.get("tool_version").and_then(serde_json::Value::as_str).is_none() {
        return Err(schema("report has no tool_version".into()));
    }
    serde_json::from_value(value).map_err(|e| schema(e.to_string()))
}

/// Recompute every input digest and fail on the first mismatch.
pub fn verify_inputs<T>(report: &Report<T>) -> Result<()> {
    for d in &report.inputs {
        let now = digest_file(&d.path, d.kind)?;
        if now != d.digest {
            return Err(Error::Schema {
                path: d.path.clone(),
                message: format!("digest mismatch: report has {}, file has {now}", d.digest),
            });
        }
    }
    Ok(())
}
