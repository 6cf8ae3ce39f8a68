//! Deterministic artifact writers: CSV with a fixed column order and fixed
//! numeric width, pretty-printed JSON with declaration-ordered keys. Running
//! the same experiment twice must produce byte-identical files, so every
//! number is formatted with an explicit width and nothing iterates hash maps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Formats one CSV value: scientific notation with 12 significant digits,
/// enough to round-trip the solver output while keeping the width fixed.
pub fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

/// Creates the output directory (and parents) if missing.
pub fn ensure_dir(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)
}

/// Writes a CSV file: the `header` line, then one comma-joined row per entry.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[Vec<f64>],
) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(path)
}

/// Writes a spectrum CSV: integer mode index, then the two amplitude columns.
pub fn write_spectrum_csv(
    dir: &Path,
    name: &str,
    rows: &[(usize, f64, f64)],
) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "k,amp_equilibrium,amp_nogame")?;
    for &(k, equilibrium, nogame) in rows {
        writeln!(out, "{k},{},{}", fmt(equilibrium), fmt(nogame))?;
    }
    out.flush()?;
    Ok(path)
}

/// Writes pretty-printed JSON with a trailing newline. Serialized struct
/// fields keep their declaration order, so the output is deterministic.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::other)?;
    writeln!(out)?;
    out.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_carry_twelve_significant_digits() {
        assert_eq!(fmt(2.364551), "2.36455100000e0");
        assert_eq!(fmt(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(fmt(0.0), "0.00000000000e0");
    }

    #[test]
    fn csv_layout_is_header_plus_fixed_width_rows() {
        let dir = tempfile::tempdir().expect("temp dir");
        let rows = vec![vec![0.0, 1.0], vec![0.5, -2.0]];
        let path = write_csv(dir.path(), "t.csv", "t,x", &rows).expect("write");
        let text = fs::read_to_string(path).expect("read back");
        assert_eq!(
            text,
            "t,x\n0.00000000000e0,1.00000000000e0\n5.00000000000e-1,-2.00000000000e0\n"
        );
    }
}
