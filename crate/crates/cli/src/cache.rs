//! On-disk cache of evaluated series, keyed by the canonical printed
//! expression and the truncation order.
//!
//! Each entry is one JSON file. Writes go to a private temporary file that
//! is then renamed over the target, so concurrent readers only ever see a
//! complete entry and concurrent writers of one key simply race to the same
//! content.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use heckmort_core::series::SeriesJson;
use heckmort_core::{Exponent, QSeries};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "HECKMORT_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    expr: String,
    order: (i64, i64),
    series: SeriesJson,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$HECKMORT_CACHE_DIR`, else `$XDG_CACHE_HOME/heckmort`, else
    /// `~/.cache/heckmort`.
    pub fn default_dir() -> PathBuf {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return PathBuf::from(d);
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return Path::new(&d).join("heckmort");
        }
        match std::env::var_os("HOME") {
            Some(h) => Path::new(&h).join(".cache").join("heckmort"),
            None => PathBuf::from(".heckmort-cache"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(expr: &str, order: Exponent) -> String {
        let mut h = Sha256::new();
        h.update(expr.as_bytes());
        h.update(b"\0");
        h.update(order.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, expr: &str, order: Exponent) -> PathBuf {
        self.dir.join(format!("{}-{}_{}.json", Self::key(expr, order), order.numer(), order.denom()))
    }

    /// A cached series, if present and readable; a damaged entry is a miss.
    pub fn load(&self, expr: &str, order: Exponent) -> Option<QSeries> {
        let text = fs::read_to_string(self.path(expr, order)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        if entry.expr != expr || entry.order != (order.numer(), order.denom()) {
            return None;
        }
        QSeries::from_json(&entry.series).ok()
    }

    pub fn store(&self, expr: &str, order: Exponent, series: &QSeries) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry { expr: expr.to_string(), order: (order.numer(), order.denom()), series: series.to_json() };
        let text = serde_json::to_string(&entry).map_err(io::Error::other)?;
        let tmp = self.dir.join(format!(".tmp-{}-{}", std::process::id(), TMP_COUNTER.fetch_add(1, Ordering::Relaxed)));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, self.path(expr, order))
    }

    /// Removes every entry; returns how many were deleted.
    pub fn clear(&self) -> io::Result<usize> {
        let mut n = 0;
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        for entry in entries {
            let path = entry?.path();
            let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
            if name.ends_with(".json") || name.starts_with(".tmp-") {
                fs::remove_file(&path)?;
                n += 1;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use heckmort_core::series::from_int_coeffs;

    #[test]
    fn store_load_clear() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("c"));
        let order = Exponent::new(15, 2);
        assert!(cache.load("Jm(1)", order).is_none());
        let s = from_int_coeffs(&[1, -1, -1], order);
        cache.store("Jm(1)", order, &s).unwrap();
        assert_eq!(cache.load("Jm(1)", order), Some(s));
        assert!(cache.load("Jm(2)", order).is_none());
        assert!(cache.load("Jm(1)", Exponent::int(7)).is_none());
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.load("Jm(1)", order).is_none());
    }

    #[test]
    fn damaged_entries_are_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let order = Exponent::int(5);
        cache.store("1", order, &QSeries::one(5)).unwrap();
        fs::write(cache.path("1", order), "{not json").unwrap();
        assert!(cache.load("1", order).is_none());
    }

    #[test]
    fn keys_separate_expression_and_order() {
        assert_ne!(Cache::key("a1", Exponent::int(2)), Cache::key("a", Exponent::int(12)));
        assert_eq!(Cache::key("x", Exponent::int(3)).len(), 64);
    }
}
