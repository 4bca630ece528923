use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const WAG_PRESETS_TOML: &str = include_str!("../../presets/wag_roots.toml");

#[derive(Debug, Clone, Deserialize)]
struct Preset {
    roots: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
struct PresetFile {
    presets: BTreeMap<String, Preset>,
}

/// Named root-category lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presets(BTreeMap<String, Vec<String>>);

impl Presets {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let f: PresetFile = toml::from_str(text).map_err(|e| Error::Schema {
            path: origin.into(),
            message: e.to_string(),
        })?;
        Ok(Presets(f.presets.into_iter().map(|(k, v)| (k, v.roots)).collect()))
    }

    pub fn get(&self, name: &str) -> Result<&[String]> {
        self.0.get(name).map(Vec::as_slice).ok_or_else(|| {
            Error::UnknownId(format!(
                "unknown preset {name:?} (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

pub fn builtin_presets() -> Presets {
    Presets::parse(WAG_PRESETS_TOML, "<builtin>").expect("builtin presets parse")
}

pub fn load_presets(path: &Path) -> Result<Presets> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Presets::parse(&text, &path.display().to_string())
}
