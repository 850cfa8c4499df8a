//! On-disk result cache for the expensive sweeps.
//!
//! Entries are content-addressed by a digest of the command, its canonical
//! arguments, the guards, and the artifact version, so a version bump or a
//! changed guard invalidates old entries. Stored values are the exact JSON
//! bytes that were printed; any read or parse failure falls back to
//! recomputation.

use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

/// Bump to invalidate previously cached reports.
pub const CACHE_SCHEMA: u32 = 1;

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    fn path_for(&self, descriptor: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let mut hasher = Sha256::new();
        hasher.update(descriptor.as_bytes());
        let digest = hasher.finalize();
        let mut name = String::with_capacity(64);
        for byte in digest {
            name.push_str(&format!("{:02x}", byte));
        }
        Some(dir.join(format!("{}.json", name)))
    }

    /// A cached report, if present and still parseable as JSON.
    pub fn get(&self, descriptor: &str) -> Option<String> {
        let path = self.path_for(descriptor)?;
        let bytes = fs::read_to_string(&path).ok()?;
        serde_json::from_str::<serde_json::Value>(&bytes).ok()?;
        Some(bytes)
    }

    /// Best effort; failures never surface.
    pub fn put(&self, descriptor: &str, value: &str) {
        let Some(path) = self.path_for(descriptor) else {
            return;
        };
        if let Some(dir) = path.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let _ = fs::write(path, value);
    }
}

pub fn descriptor(command: &str, args: &str, max_bell: u128, max_cells: u64) -> String {
    format!(
        "v{}.{}|{}|{}|bell={}|cells={}",
        env!("CARGO_PKG_VERSION"),
        CACHE_SCHEMA,
        command,
        args,
        max_bell,
        max_cells
    )
}
