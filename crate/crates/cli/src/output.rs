//! Atomic file writes and the growth table.

use std::io::Write;
use std::path::Path;

use slowtorus_core::arithmetic::{format_interval, DEFAULT_DIGITS};
use slowtorus_core::{GrowthRecord, IntervalReal};

use crate::CliError;

pub const CSV_HEADER: [&str; 11] = [
    "N", "phi_lo", "phi_hi", "S_lo", "S_hi", "T_lo", "T_hi", "Wmax_lo", "Wmax_hi", "gamma_lo",
    "gamma_hi",
];

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn push_interval(row: &mut Vec<String>, iv: &IntervalReal) {
    let (lo, hi) = format_interval(iv, DEFAULT_DIGITS);
    row.push(lo);
    row.push(hi);
}

/// The growth table as CSV bytes; rows must already be sorted by `N`.
pub fn growth_csv(records: &[GrowthRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(CliError::csv)?;
    for r in records {
        let mut row = vec![r.n.to_string()];
        for iv in [&r.phi_n, &r.s, &r.t, &r.wmax, &r.gamma] {
            push_interval(&mut row, iv);
        }
        w.write_record(&row).map_err(CliError::csv)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}
