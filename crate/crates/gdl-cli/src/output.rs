//! Byte-deterministic table writers.
//!
//! Every float is printed as `{:.16e}` so a rerun with the same seed
//! produces identical bytes; booleans are 0/1. The tables are fixed,
//! single-shape CSVs, so the writer stays deliberately minimal.

use gdl_core::{GdlError, Result};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// `x_0,x_1,...,x_{d-1}` style headers.
pub fn indexed(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|k| format!("{prefix}_{k}")).collect()
}

pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path)
        .map_err(|e| GdlError::input(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| GdlError::input(format!("write {}: {e}", path.display()));
    writeln!(w, "{}", header.join(",")).map_err(io_err)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let io_err = |e: std::io::Error| GdlError::input(format!("write {}: {e}", path.display()));
    let file = File::create(path)
        .map_err(|e| GdlError::input(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| GdlError::input(format!("serialize {}: {e}", path.display())))?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_stable() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(-1.0 / 3.0), "-3.3333333333333331e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &["a".to_string(), "b".to_string()],
            vec![vec![fmt_f64(1.0), fmt_bool(true).to_string()]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1.0000000000000000e0,1\n");
    }
}
