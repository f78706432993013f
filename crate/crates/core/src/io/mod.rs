//! File formats: score manifests, run configs, plots, result tables and
//! provenance blocks.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod provenance;
pub mod table;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use config::{BenchSection, RunConfig};
pub use manifest::{load_manifest, parse_manifest, write_manifest, write_manifest_to};
pub use plot::{emit_histogram_plot, render_svg, render_text, PlotPanel};
pub use provenance::{InputDigest, Provenance};
pub use table::{ordering_flags, pool_factor_table, run_bench, strategy_table, BenchReport, OrderingFlag, ResultTable, Verdict};

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let err = write_atomic(Path::new("/nonexistent-dir/x/y.txt"), b"z").unwrap_err();
        assert_eq!(err.kind(), "io");
    }
}
