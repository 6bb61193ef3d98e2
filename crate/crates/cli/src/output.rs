//! CSV traces and document writing.

use std::io::Write;
use std::path::Path;

use crate::CliError;

pub const CSV_HEADER: [&str; 3] = ["eps", "amplitude", "running_mean"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `(eps, amplitude)` pairs with their running mean, RFC 4180 style.
pub fn write_trace<W: Write>(w: W, points: &[(f64, f64)]) -> Result<(), CliError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(w);
    let io = |e: csv::Error| CliError::Io(e.into());
    out.write_record(CSV_HEADER).map_err(io)?;
    let mut sum = 0.0;
    for (k, (eps, amp)) in points.iter().enumerate() {
        sum += amp;
        out.write_record([sig17(*eps), sig17(*amp), sig17(sum / (k + 1) as f64)])
            .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace_file(path: &Path, points: &[(f64, f64)]) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    write_trace(std::io::BufWriter::new(file), points)
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
