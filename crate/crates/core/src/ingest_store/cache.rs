use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{sha256_hex, write_atomic};
use crate::error::{Error, Result};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "KGROWTH_CACHE_DIR";

const MAGIC: &str = "kgrowth-cache 1";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    /// Key over input digests, operation name and its parameters.
    pub fn new<P: Serialize>(digests: &[&str], operation: &str, params: &P) -> Result<Self> {
        let material = serde_json::to_vec(&serde_json::json!({
            "digests": digests,
            "operation": operation,
            "params": params,
        }))?;
        Ok(CacheKey(sha256_hex(&material)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Directory of `<key>.entry` files, each a header line with the payload
/// digest followed by the payload bytes.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Cache { dir })
    }

    /// Cache at `$KGROWTH_CACHE_DIR`, if set and non-empty.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Cache::new(PathBuf::from(d)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.entry", key.0))
    }

    /// Stored payload, or `None` on a miss. Unreadable or corrupt entries
    /// are logged and treated as misses.
    pub fn get(&self, key: &CacheKey) -> Option<Vec<u8>> {
        let path = self.entry(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cache entry {} unreadable: {e}", path.display());
                return None;
            }
        };
        let Some(nl) = bytes.iter().position(|&b| b == b'\n') else {
            log::warn!("cache entry {} is corrupt (no header)", path.display());
            return None;
        };
        let header = String::from_utf8_lossy(&bytes[..nl]);
        let payload = &bytes[nl + 1..];
        match header.strip_prefix(MAGIC).map(str::trim) {
            Some(sum) if sum == sha256_hex(payload) => Some(payload.to_vec()),
            _ => {
                log::warn!("cache entry {} is corrupt (checksum)", path.display());
                None
            }
        }
    }

    pub fn put(&self, key: &CacheKey, payload: &[u8]) -> Result<()> {
        let mut bytes = format!("{MAGIC} {}\n", sha256_hex(payload)).into_bytes();
        bytes.extend_from_slice(payload);
        write_atomic(&self.entry(key), &bytes)
    }
}
