//! Output helpers shared by the subcommands: numeric formatting, CSV and
//! JSON sinks that write either to a file or to stdout.

use std::io::Write;
use std::path::Path;

use crate::commands::Failure;

/// Format a float for CSV output: 12 significant digits, scientific
/// notation with a `.` decimal separator. Non-finite values print as
/// `NaN` / `inf` so downstream parsers see an explicit marker rather
/// than a silently wrong number.
pub fn sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn io_failure(path: Option<&Path>, err: &std::io::Error) -> Failure {
    let target = path.map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
    Failure::input(format!("cannot write `{target}`: {err}"))
}

/// Write CSV records (the first record is the header) to `path`, or to
/// stdout when `path` is `None`.
pub fn write_csv(path: Option<&Path>, records: &[Vec<String>]) -> Result<(), Failure> {
    let mut buf = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buf);
        for record in records {
            writer
                .write_record(record)
                .map_err(|e| Failure::input(format!("cannot encode CSV: {e}")))?;
        }
        writer.flush().map_err(|e| io_failure(path, &e))?;
    }
    write_bytes(path, &buf)
}

/// Serialize `value` as pretty JSON (trailing newline) to `path`, or to
/// stdout when `path` is `None`. Non-finite floats serialize as `null`.
pub fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::input(format!("cannot encode JSON: {e}")))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io_failure(Some(p), &e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|()| stdout.flush()).map_err(|e| io_failure(None, &e))
        }
    }
}
