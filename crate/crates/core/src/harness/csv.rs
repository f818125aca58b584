//! CSV emission: UTF-8, header row, scientific notation with 12+ significant
//! digits so results round-trip through text exactly enough for comparison.

use std::io::{self, Write};

/// Format one value in scientific notation with 13 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.12e}")
}

/// Write a header plus numeric rows to any writer.
pub fn emit_csv<W: Write>(
    out: &mut W,
    header: &str,
    rows: &[Vec<f64>],
) -> io::Result<()> {
    writeln!(out, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Write to a file path, or stdout when `path` is `None`.
pub fn emit_csv_to(
    path: Option<&std::path::Path>,
    header: &str,
    rows: &[Vec<f64>],
) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut f = std::fs::File::create(p)?;
            emit_csv(&mut f, header, rows)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit_csv(&mut lock, header, rows)
        }
    }
}
