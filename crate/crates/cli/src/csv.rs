use std::fs;
use std::io::Write;
use std::path::Path;

use deception_core::insider::Table;

use crate::{Error, Result};

/// Shortest representation of the value rounded to 9 significant digits,
/// in exponent form below 1e-4 or from 1e15 in magnitude. Negative zero
/// prints as `0`.
pub fn format_value(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub fn write_csv<W: Write>(table: &Table, mut out: W) -> Result<()> {
    if table.columns.is_empty() || table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut text = table.columns.join(",");
    text.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: "<stream>".into(),
        source,
    })
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    fs::write(path, buf).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
